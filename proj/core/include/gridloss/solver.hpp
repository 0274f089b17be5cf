#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gridloss/admittance.hpp"
#include "gridloss/network.hpp"

namespace gridloss {

/// Polar voltage state. Angles are radians internally; reports convert to degrees.
struct StateVector {
    Eigen::VectorXd v_mag;
    Eigen::VectorXd v_ang;

    Eigen::VectorXcd to_complex() const;
};

struct SolverOptions {
    double tolerance = 1e-6;   // per-unit mismatch threshold
    int max_iterations = 30;
    bool enforce_q_limits = true;
    bool flat_start = true;    // when false, solve() starts from a caller-provided state
};

struct QLimitSwitch {
    int bus_id = 0;     // external id
    int iteration = 0;
    bool at_upper = false;
};

struct LoadFlowSolution {
    StateVector state;
    bool converged = false;
    int iterations = 0;                  // mismatch evaluations performed
    std::vector<double> mismatch_trace;  // max |dP|,|dQ| at each evaluation
    Eigen::VectorXd p_injection;         // computed per-bus injections, per-unit
    Eigen::VectorXd q_injection;
    std::vector<QLimitSwitch> q_limit_switches;
};

struct SingularJacobianError : std::runtime_error {
    explicit SingularJacobianError(int iteration);
    int iteration = 0;
};

/// Flat start: slack and generator buses at their set-points, load buses at
/// 1.0, all angles zero.
StateVector initial_state(const Network& net);

/// P and Q injections at every bus, S_i = V_i * conj(sum_k Y_ik V_k).
void compute_injections(const StateVector& state, const AdmittanceMatrix& ybus,
                        Eigen::VectorXd& p, Eigen::VectorXd& q);

/// Mismatch vector ordered [dP over non-slack ascending, dQ over PQ ascending].
/// pq and pv must partition the non-slack internal indices.
Eigen::VectorXd compute_mismatch(const Network& net, const StateVector& state,
                                 const AdmittanceMatrix& ybus,
                                 std::span<const int> pq, std::span<const int> pv);

/// Four-block polar Jacobian [dP/dang dP/dmag; dQ/dang dQ/dmag] over
/// (non-slack angles, PQ magnitudes), same row/column ordering as the mismatch.
Eigen::MatrixXd build_jacobian(const StateVector& state, const AdmittanceMatrix& ybus,
                               std::span<const int> pq, std::span<const int> pv);

/// Full Newton-Raphson with optional PV->PQ reactive-limit switching. A bus
/// pushed to a limit is re-examined each iteration and restored to PV when its
/// voltage recrosses the set-point in the relieving direction. Non-convergence
/// is reported through the solution; a singular Jacobian throws.
LoadFlowSolution solve(const Network& net, const SolverOptions& options = {},
                       const std::optional<StateVector>& warm_state = std::nullopt);

}  // namespace gridloss
