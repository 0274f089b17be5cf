#include "gridloss/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace gridloss {

Eigen::VectorXcd StateVector::to_complex() const {
    const auto n = v_mag.size();
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = std::polar(v_mag(i), v_ang(i));
    }
    return v;
}

SingularJacobianError::SingularJacobianError(int it)
    : std::runtime_error("singular Jacobian at iteration " + std::to_string(it)),
      iteration(it) {}

StateVector initial_state(const Network& net) {
    const int n = net.size();
    StateVector s;
    s.v_mag = Eigen::VectorXd::Ones(n);
    s.v_ang = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        const auto& b = net.buses[i];
        if (b.kind != BusKind::Load) s.v_mag(i) = b.v_set;
    }
    return s;
}

void compute_injections(const StateVector& state, const AdmittanceMatrix& ybus,
                        Eigen::VectorXd& p, Eigen::VectorXd& q) {
    const Eigen::VectorXcd v = state.to_complex();
    const Eigen::VectorXcd s = v.cwiseProduct((ybus.y * v).conjugate());
    p = s.real();
    q = s.imag();
}

namespace {

std::vector<int> sorted_union(std::span<const int> a, std::span<const int> b) {
    std::vector<int> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    return out;
}

// mismatch with explicit per-bus scheduled reactive injection (solver path,
// where limit-switched PV buses carry an adjusted schedule)
Eigen::VectorXd mismatch_impl(const Network& net, const Eigen::VectorXd& p,
                              const Eigen::VectorXd& q, std::span<const int> pq,
                              std::span<const int> pv, const Eigen::VectorXd& q_sched) {
    const auto nonslack = sorted_union(pq, pv);
    Eigen::VectorXd m(nonslack.size() + pq.size());
    Eigen::Index k = 0;
    for (int i : nonslack) {
        m(k++) = (net.buses[i].p_gen - net.buses[i].p_demand) - p(i);
    }
    for (int i : pq) {
        m(k++) = q_sched(i) - q(i);
    }
    return m;
}

}  // namespace

Eigen::VectorXd compute_mismatch(const Network& net, const StateVector& state,
                                 const AdmittanceMatrix& ybus,
                                 std::span<const int> pq, std::span<const int> pv) {
    Eigen::VectorXd p, q;
    compute_injections(state, ybus, p, q);
    Eigen::VectorXd q_sched(net.size());
    for (int i = 0; i < net.size(); ++i) q_sched(i) = -net.buses[i].q_demand;
    return mismatch_impl(net, p, q, pq, pv, q_sched);
}

Eigen::MatrixXd build_jacobian(const StateVector& state, const AdmittanceMatrix& ybus,
                               std::span<const int> pq, std::span<const int> pv) {
    const Eigen::VectorXcd v = state.to_complex();
    const Eigen::VectorXcd ibus = ybus.y * v;
    Eigen::VectorXcd vnorm(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        vnorm(i) = std::polar(1.0, state.v_ang(i));
    }

    // complex power derivatives: dS/dang = j diag(V) conj(diag(I) - Y diag(V)),
    // dS/dmag = diag(V) conj(Y diag(Vnorm)) + diag(conj(I)) diag(Vnorm)
    Eigen::MatrixXcd a = -(ybus.y * v.asDiagonal());
    a.diagonal() += ibus;
    const Eigen::MatrixXcd ds_dang =
        (std::complex<double>(0, 1) * v).asDiagonal() * a.conjugate();

    Eigen::MatrixXcd ds_dmag = v.asDiagonal() * (ybus.y * vnorm.asDiagonal()).conjugate();
    ds_dmag.diagonal() += ibus.conjugate().cwiseProduct(vnorm);

    const auto nonslack = sorted_union(pq, pv);
    const Eigen::Index na = static_cast<Eigen::Index>(nonslack.size());
    const Eigen::Index nm = static_cast<Eigen::Index>(pq.size());
    Eigen::MatrixXd jac(na + nm, na + nm);
    for (Eigen::Index r = 0; r < na; ++r) {
        for (Eigen::Index c = 0; c < na; ++c) {
            jac(r, c) = ds_dang(nonslack[r], nonslack[c]).real();
        }
        for (Eigen::Index c = 0; c < nm; ++c) {
            jac(r, na + c) = ds_dmag(nonslack[r], pq[c]).real();
        }
    }
    for (Eigen::Index r = 0; r < nm; ++r) {
        for (Eigen::Index c = 0; c < na; ++c) {
            jac(na + r, c) = ds_dang(pq[r], nonslack[c]).imag();
        }
        for (Eigen::Index c = 0; c < nm; ++c) {
            jac(na + r, na + c) = ds_dmag(pq[r], pq[c]).imag();
        }
    }
    return jac;
}

LoadFlowSolution solve(const Network& net, const SolverOptions& options,
                       const std::optional<StateVector>& warm_state) {
    const int n = net.size();
    const int slack = net.slack_index();
    const auto ybus = build_ybus(net);

    LoadFlowSolution sol;
    sol.state = (!options.flat_start && warm_state) ? *warm_state : initial_state(net);
    Eigen::VectorXd& vm = sol.state.v_mag;
    Eigen::VectorXd& va = sol.state.v_ang;

    std::vector<bool> is_pv(n, false);
    for (int i = 0; i < n; ++i) is_pv[i] = net.buses[i].kind == BusKind::Generator;
    // adjusted reactive schedule for limit-switched buses; +1 upper, -1 lower
    std::vector<int> limit_side(n, 0);

    Eigen::VectorXd p(n), q(n);
    int updates = 0;

    while (true) {
        compute_injections(sol.state, ybus, p, q);

        if (options.enforce_q_limits && updates >= 1) {
            bool changed = false;
            for (int i = 0; i < n; ++i) {
                const auto& b = net.buses[i];
                if (b.kind != BusKind::Generator) continue;
                if (limit_side[i] == 0) {
                    const double q_gen = q(i) + b.q_demand;
                    if (q_gen > b.q_max + 1e-9) {
                        limit_side[i] = +1;
                        is_pv[i] = false;
                        sol.q_limit_switches.push_back({b.id, updates, true});
                        changed = true;
                    } else if (q_gen < b.q_min - 1e-9) {
                        limit_side[i] = -1;
                        is_pv[i] = false;
                        sol.q_limit_switches.push_back({b.id, updates, false});
                        changed = true;
                    }
                } else {
                    // restore PV when the voltage recrosses the set-point in
                    // the relieving direction
                    const bool relieve = (limit_side[i] > 0) ? vm(i) > b.v_set
                                                             : vm(i) < b.v_set;
                    if (relieve) {
                        limit_side[i] = 0;
                        is_pv[i] = true;
                        vm(i) = b.v_set;
                        changed = true;
                    }
                }
            }
            if (changed) compute_injections(sol.state, ybus, p, q);
        }

        std::vector<int> pq, pv;
        for (int i = 0; i < n; ++i) {
            if (i == slack) continue;
            (is_pv[i] ? pv : pq).push_back(i);
        }
        Eigen::VectorXd q_sched(n);
        for (int i = 0; i < n; ++i) {
            const auto& b = net.buses[i];
            if (limit_side[i] > 0) {
                q_sched(i) = b.q_max - b.q_demand;
            } else if (limit_side[i] < 0) {
                q_sched(i) = b.q_min - b.q_demand;
            } else {
                q_sched(i) = -b.q_demand;
            }
        }
        const Eigen::VectorXd mism = mismatch_impl(net, p, q, pq, pv, q_sched);
        const double worst = mism.size() ? mism.cwiseAbs().maxCoeff() : 0.0;
        sol.mismatch_trace.push_back(worst);

        if (!std::isfinite(worst)) break;  // diverged state
        if (worst < options.tolerance) {
            sol.converged = true;
            break;
        }
        if (updates >= options.max_iterations) break;

        const Eigen::MatrixXd jac = build_jacobian(sol.state, ybus, pq, pv);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() < 1e-12) {
            throw SingularJacobianError(updates);
        }
        const Eigen::VectorXd dx = lu.solve(mism);
        Eigen::Index k = 0;
        for (int i : sorted_union(pq, pv)) va(i) += dx(k++);
        for (int i : pq) vm(i) += dx(k++);
        ++updates;
        if (!vm.allFinite() || !va.allFinite() || vm.minCoeff() <= 0.0) {
            sol.mismatch_trace.push_back(std::numeric_limits<double>::infinity());
            break;
        }
    }

    sol.iterations = static_cast<int>(sol.mismatch_trace.size());
    if (vm.allFinite() && va.allFinite()) {
        compute_injections(sol.state, ybus, p, q);
    }
    sol.p_injection = p;  // last finite evaluation when the state diverged
    sol.q_injection = q;
    return sol;
}

}  // namespace gridloss
