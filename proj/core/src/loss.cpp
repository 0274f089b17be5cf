#include "gridloss/loss.hpp"

#include "gridloss/admittance.hpp"

namespace gridloss {

BranchCurrents branch_current(const StateVector& state, const Network& net,
                              const Branch& branch) {
    const int i = net.index_of(branch.from_bus);
    const int j = net.index_of(branch.to_bus);
    const auto [ys, ysh] = branch_admittance(branch);
    const double a = branch.tap;
    const std::complex<double> vi = std::polar(state.v_mag(i), state.v_ang(i));
    const std::complex<double> vj = std::polar(state.v_mag(j), state.v_ang(j));

    // pi model with the tap on the from side: the from-end terminal sees the
    // internal node vi/a through the ideal transformer
    BranchCurrents c;
    c.i_from = ((vi / a - vj) * ys + (vi / a) * ysh) / a;
    c.i_to = (vj - vi / a) * ys + vj * ysh;
    return c;
}

std::vector<BranchFlow> branch_flows(const StateVector& state, const Network& net) {
    std::vector<BranchFlow> out;
    out.reserve(net.branches.size());
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        const auto& br = net.branches[k];
        const int i = net.index_of(br.from_bus);
        const int j = net.index_of(br.to_bus);
        const std::complex<double> vi = std::polar(state.v_mag(i), state.v_ang(i));
        const std::complex<double> vj = std::polar(state.v_mag(j), state.v_ang(j));
        const auto cur = branch_current(state, net, br);
        const auto [ys, ysh] = branch_admittance(br);

        BranchFlow f;
        f.branch_index = static_cast<int>(k);
        f.s_from = vi * std::conj(cur.i_from);
        f.s_to = vj * std::conj(cur.i_to);
        f.p_loss = f.s_from.real() + f.s_to.real();
        f.q_net = f.s_from.imag() + f.s_to.imag();
        const std::complex<double> i_series = (vi / br.tap - vj) * ys;
        f.q_loss = std::norm(i_series) * br.x;
        f.q_charging = f.q_loss - f.q_net;
        out.push_back(f);
    }
    return out;
}

LossReport total_losses(const std::vector<BranchFlow>& flows, const Network& net,
                        const LoadFlowSolution& solution) {
    LossReport r;
    r.branch_flows = flows;
    const double base = net.base_mva;
    for (const auto& f : flows) {
        r.total_p_loss_mw += f.p_loss;
        r.total_q_loss_mvar += f.q_loss;
        r.total_q_net_mvar += f.q_net;
        r.charging_mvar += f.q_charging;
    }
    r.total_p_loss_mw *= base;
    r.total_q_loss_mvar *= base;
    r.total_q_net_mvar *= base;
    r.charging_mvar *= base;

    for (int i = 0; i < net.size(); ++i) {
        const auto& b = net.buses[i];
        r.load_p_mw += b.p_demand;
        r.load_q_mvar += b.q_demand;
        // actual generation = computed injection + demand; zero at pure load buses
        r.gen_p_mw += solution.p_injection(i) + b.p_demand;
        r.gen_q_mvar += solution.q_injection(i) + b.q_demand;
        r.shunt_mvar += b.shunt_b * solution.state.v_mag(i) * solution.state.v_mag(i);
    }
    r.load_p_mw *= base;
    r.load_q_mvar *= base;
    r.gen_p_mw *= base;
    r.gen_q_mvar *= base;
    r.shunt_mvar *= base;
    return r;
}

LossReport analyze_losses(const Network& net, const LoadFlowSolution& solution) {
    return total_losses(branch_flows(solution.state, net), net, solution);
}

}  // namespace gridloss
