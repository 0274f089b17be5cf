#include "gridloss/strategies.hpp"

#include <cmath>
#include <sstream>

#include "gridloss/loss.hpp"

namespace gridloss {

namespace {

// "key=value,key=value" payload after the strategy name
std::vector<std::pair<std::string, std::string>> parse_pairs(const std::string& body,
                                                             const std::string& spec) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(body);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= item.size()) {
            throw StrategyError("bad strategy token '" + item + "' in '" + spec + "'");
        }
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return out;
}

double to_double(const std::string& v, const std::string& spec) {
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || !std::isfinite(d)) {
        throw StrategyError("bad numeric value '" + v + "' in '" + spec + "'");
    }
    return d;
}

int to_int(const std::string& v, const std::string& spec) {
    char* end = nullptr;
    long d = std::strtol(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size()) {
        throw StrategyError("bad integer value '" + v + "' in '" + spec + "'");
    }
    return static_cast<int>(d);
}

}  // namespace

Strategy parse_strategy(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw StrategyError("missing ':' in strategy '" + spec + "'");
    }
    const std::string name = spec.substr(0, colon);
    const auto pairs = parse_pairs(spec.substr(colon + 1), spec);
    auto get = [&](const char* key) -> const std::string& {
        for (const auto& [k, v] : pairs) {
            if (k == key) return v;
        }
        throw StrategyError("strategy '" + spec + "' is missing key '" + key + "'");
    };

    if (name == "load-share") {
        LoadShare s{to_int(get("from"), spec), to_int(get("to"), spec),
                    to_double(get("frac"), spec)};
        if (s.fraction < 0.0 || s.fraction > 1.0) {
            throw StrategyError("fraction out of [0,1] in '" + spec + "'");
        }
        return s;
    }
    if (name == "q-inject") {
        ReactiveInjection s{to_int(get("bus"), spec), to_double(get("mvar"), spec)};
        if (s.q_mvar < 0.0) throw StrategyError("mvar must be >= 0 in '" + spec + "'");
        return s;
    }
    if (name == "tap") {
        TapChange s{to_int(get("from"), spec), to_int(get("to"), spec),
                    to_double(get("tap"), spec)};
        if (!(s.new_tap > 0.0)) throw StrategyError("tap must be > 0 in '" + spec + "'");
        return s;
    }
    throw StrategyError("unknown strategy '" + name + "'");
}

std::string label(const Strategy& strategy) {
    std::ostringstream out;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LoadShare>) {
                out << "load-share " << s.fraction * 100.0 << "% " << s.from_bus
                    << "->" << s.to_bus;
            } else if constexpr (std::is_same_v<T, ReactiveInjection>) {
                out << "q-inject " << s.q_mvar << " MVAR @ bus " << s.bus;
            } else {
                out << "tap " << s.from_bus << "-" << s.to_bus << " = " << s.new_tap;
            }
        },
        strategy);
    return out.str();
}

Network share_load(const Network& net, int from_bus, int to_bus, double fraction) {
    if (from_bus == to_bus) throw StrategyError("load-share: from and to are the same bus");
    if (fraction < 0.0 || fraction > 1.0) throw StrategyError("load-share: fraction out of [0,1]");
    const int i = net.index_of(from_bus);
    const int j = net.index_of(to_bus);
    if (i < 0) throw StrategyError("load-share: bus " + std::to_string(from_bus) + " not found");
    if (j < 0) throw StrategyError("load-share: bus " + std::to_string(to_bus) + " not found");
    if (!(net.buses[i].p_demand > 0.0)) {
        throw StrategyError("load-share: bus " + std::to_string(from_bus) + " has no real demand");
    }
    Network out = net;
    const double moved = fraction * out.buses[i].p_demand;
    out.buses[i].p_demand -= moved;
    out.buses[j].p_demand += moved;
    return out;
}

Network inject_reactive(const Network& net, int bus, double q_mvar) {
    const int i = net.index_of(bus);
    if (i < 0) throw StrategyError("q-inject: bus " + std::to_string(bus) + " not found");
    Network out = net;
    out.buses[i].q_demand -= q_mvar / net.base_mva;
    return out;
}

Network set_tap(const Network& net, int from_bus, int to_bus, double new_tap) {
    const int k = net.branch_between(from_bus, to_bus);
    if (k < 0) {
        throw StrategyError("tap: branch " + std::to_string(from_bus) + "-"
                            + std::to_string(to_bus) + " not found");
    }
    Network out = net;
    out.branches[k].tap = new_tap;
    return out;
}

Network apply_strategy(const Network& net, const Strategy& strategy) {
    return std::visit(
        [&](const auto& s) -> Network {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LoadShare>) {
                return share_load(net, s.from_bus, s.to_bus, s.fraction);
            } else if constexpr (std::is_same_v<T, ReactiveInjection>) {
                return inject_reactive(net, s.bus, s.q_mvar);
            } else {
                return set_tap(net, s.from_bus, s.to_bus, s.new_tap);
            }
        },
        strategy);
}

namespace {

ScenarioResult run_scenario(const std::string& name, const Network& net,
                            const SolverOptions& options) {
    ScenarioResult row;
    row.name = name;
    const auto sol = solve(net, options);
    row.converged = sol.converged;
    if (sol.converged) {
        const auto losses = analyze_losses(net, sol);
        row.p_loss_mw = losses.total_p_loss_mw;
        row.q_loss_mvar = losses.total_q_loss_mvar;
        Eigen::Index arg = 0;
        row.min_voltage = sol.state.v_mag.minCoeff(&arg);
        row.min_voltage_bus = net.buses[static_cast<int>(arg)].id;
    }
    return row;
}

}  // namespace

std::vector<ScenarioResult> compare(const Network& net,
                                    const std::vector<Strategy>& strategies,
                                    const SolverOptions& options) {
    std::vector<ScenarioResult> rows;
    rows.push_back(run_scenario("base", net, options));
    const double base_loss = rows.front().p_loss_mw;
    for (const auto& s : strategies) {
        rows.push_back(run_scenario(label(s), apply_strategy(net, s), options));
        if (rows.back().converged && rows.front().converged) {
            rows.back().delta_p_mw = rows.back().p_loss_mw - base_loss;
        }
    }
    return rows;
}

}  // namespace gridloss
