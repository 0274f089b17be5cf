#include "gridloss/admittance.hpp"

#include <cassert>

namespace gridloss {

BranchAdmittance branch_admittance(const Branch& branch) {
    assert(branch.r != 0.0 || branch.x != 0.0);
    return {
        1.0 / std::complex<double>(branch.r, branch.x),
        std::complex<double>(0.0, branch.b_charging / 2.0),
    };
}

AdmittanceMatrix build_ybus(const Network& net) {
    const int n = net.size();
    AdmittanceMatrix m;
    m.y = Eigen::MatrixXcd::Zero(n, n);

    for (const auto& br : net.branches) {
        const int i = net.index_of(br.from_bus);
        const int j = net.index_of(br.to_bus);
        const auto [ys, ysh] = branch_admittance(br);
        const double a = br.tap;
        // single computed value stamped into both triangles keeps the matrix
        // exactly symmetric
        const std::complex<double> mutual = -ys / a;
        m.y(i, i) += (ys + ysh) / (a * a);
        m.y(j, j) += ys + ysh;
        m.y(i, j) += mutual;
        m.y(j, i) += mutual;
    }
    const auto shunts = apply_shunts(net);
    for (int i = 0; i < n; ++i) m.y(i, i) += shunts[i];
    return m;
}

}  // namespace gridloss
