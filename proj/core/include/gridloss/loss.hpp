#pragma once

#include <complex>
#include <vector>

#include "gridloss/network.hpp"
#include "gridloss/solver.hpp"

namespace gridloss {

/// Per-branch complex flows and losses, per-unit. s_from and s_to both measure
/// power flowing INTO the branch, so the real loss is their sum. q_loss is the
/// series reactive loss |I|^2 x (the quantity engineering reports quote);
/// q_net subtracts the charging injection at both ends:
///   q_net = Im(s_from) + Im(s_to) = q_loss - q_charging.
struct BranchFlow {
    int branch_index = 0;
    std::complex<double> s_from;
    std::complex<double> s_to;
    double p_loss = 0.0;
    double q_loss = 0.0;
    double q_net = 0.0;
    double q_charging = 0.0;
};

struct BranchCurrents {
    std::complex<double> i_from;  // into the branch at the from end
    std::complex<double> i_to;    // into the branch at the to end
};

/// Tap-aware pi-model terminal currents; for tap = 1 the from-end current is
/// (V_f - V_t) * y_series + V_f * y_shunt_half.
BranchCurrents branch_current(const StateVector& state, const Network& net,
                              const Branch& branch);

std::vector<BranchFlow> branch_flows(const StateVector& state, const Network& net);

/// System totals in engineering units (MW / MVAR).
struct LossReport {
    std::vector<BranchFlow> branch_flows;
    double total_p_loss_mw = 0.0;
    double total_q_loss_mvar = 0.0;      // series reactive loss
    double total_q_net_mvar = 0.0;       // net of line-charging injection
    double charging_mvar = 0.0;          // total charging injection
    double shunt_mvar = 0.0;             // total bus-shunt injection
    double gen_p_mw = 0.0;
    double gen_q_mvar = 0.0;
    double load_p_mw = 0.0;
    double load_q_mvar = 0.0;
};

/// Sums branch flows and derives the generation/load balance from the solved
/// injections. Balance identities, within solver tolerance:
///   gen_p - load_p = total_p_loss
///   gen_q + charging + shunt = load_q + total_q_loss
LossReport total_losses(const std::vector<BranchFlow>& flows, const Network& net,
                        const LoadFlowSolution& solution);

/// Convenience: branch_flows + total_losses for a solved case.
LossReport analyze_losses(const Network& net, const LoadFlowSolution& solution);

}  // namespace gridloss
