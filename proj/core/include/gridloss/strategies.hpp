#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gridloss/network.hpp"
#include "gridloss/solver.hpp"

namespace gridloss {

struct LoadShare {
    int from_bus = 0;
    int to_bus = 0;
    double fraction = 0.0;  // share of from_bus real demand moved, [0, 1]
};

struct ReactiveInjection {
    int bus = 0;
    double q_mvar = 0.0;  // injected MVAR, modeled as a demand offset
};

struct TapChange {
    int from_bus = 0;
    int to_bus = 0;
    double new_tap = 1.0;
};

using Strategy = std::variant<LoadShare, ReactiveInjection, TapChange>;

struct StrategyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// CLI syntax: "load-share:from=5,to=4,frac=0.15", "q-inject:bus=30,mvar=1.0",
/// "tap:from=4,to=12,tap=1.0". Throws StrategyError naming the offending token.
Strategy parse_strategy(const std::string& spec);

std::string label(const Strategy& strategy);

/// Moves fraction * p_demand(from) of real demand to `to`; reactive demand is
/// untouched and total system demand is conserved.
Network share_load(const Network& net, int from_bus, int to_bus, double fraction);

/// Net reactive injection as a demand offset; may drive q_demand negative.
Network inject_reactive(const Network& net, int bus, double q_mvar);

Network set_tap(const Network& net, int from_bus, int to_bus, double new_tap);

Network apply_strategy(const Network& net, const Strategy& strategy);

struct ScenarioResult {
    std::string name;
    bool converged = false;
    double p_loss_mw = 0.0;
    double q_loss_mvar = 0.0;
    double delta_p_mw = 0.0;   // vs the base row
    int min_voltage_bus = 0;   // external id
    double min_voltage = 0.0;
};

/// Solves the base case plus each strategy scenario; base row first, scenario
/// rows in input order. Per-scenario non-convergence flags the row instead of
/// failing the comparison.
std::vector<ScenarioResult> compare(const Network& net,
                                    const std::vector<Strategy>& strategies,
                                    const SolverOptions& options = {});

}  // namespace gridloss
