#pragma once

#include <Eigen/Core>
#include <complex>

#include "gridloss/network.hpp"

namespace gridloss {

/// Dense complex nodal admittance matrix. Symmetric for real taps; both
/// triangles are stamped from the same computed value, so symmetry is exact
/// in floating point.
struct AdmittanceMatrix {
    Eigen::MatrixXcd y;

    int size() const { return static_cast<int>(y.rows()); }
    std::complex<double> operator()(int i, int j) const { return y(i, j); }
};

struct BranchAdmittance {
    std::complex<double> y_series;      // 1 / (r + jx)
    std::complex<double> y_shunt_half;  // j * b_charging / 2
};

BranchAdmittance branch_admittance(const Branch& branch);

/// Stamps every branch (tap-aware pi model, tap on the from side) and every
/// bus shunt. For a branch with series admittance y, charging half ysh and
/// tap a: (y+ysh)/a^2 on the from diagonal, y+ysh on the to diagonal, -y/a on
/// both off-diagonals.
AdmittanceMatrix build_ybus(const Network& net);

}  // namespace gridloss
