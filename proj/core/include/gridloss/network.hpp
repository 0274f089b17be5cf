#pragma once

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridloss {

enum class BusKind { Slack, Generator, Load };

const char* to_string(BusKind kind);

/// One network node. All electrical quantities are per-unit on the system
/// base; demands and generation are net values as scheduled, not solved.
struct Bus {
    int id = 0;             // external bus number, preserved for I/O
    BusKind kind = BusKind::Load;
    double p_demand = 0.0;
    double q_demand = 0.0;
    double p_gen = 0.0;     // scheduled real generation (slack/generator buses)
    double v_set = 1.0;     // voltage magnitude set-point, > 0 for slack/generator
    double q_min = 0.0;     // reactive generation limits
    double q_max = 0.0;
    double shunt_b = 0.0;   // shunt susceptance, positive = capacitive
};

/// Series branch of the nominal-pi model. The off-nominal tap, when not 1.0,
/// sits on the from_bus side.
struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0;
    double x = 0.0;
    double b_charging = 0.0;  // total line-charging susceptance
    double tap = 1.0;
};

/// Immutable-by-convention scenario model: solvers and transformations take
/// `const Network&` and never mutate; strategy operations return copies.
/// Internal (dense, 0-based) bus indices are positions in `buses`.
struct Network {
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;

    int size() const { return static_cast<int>(buses.size()); }

    /// Internal index of an external bus id, -1 when absent.
    int index_of(int bus_id) const;

    /// Index into `branches` of the first branch from->to (directional), -1 when absent.
    int branch_between(int from_id, int to_id) const;

    /// Internal index of the slack bus, -1 when absent.
    int slack_index() const;
};

struct ParseError : std::runtime_error {
    ParseError(int line_number, const std::string& what);
    int line = 0;
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::vector<std::string>& violations);
    std::vector<std::string> violations;
};

/// Parses the line-oriented case format ([system]/[buses]/[branches] sections)
/// and converts MW/MVAR fields to per-unit on base_mva. Throws ParseError on
/// malformed input and ValidationError when the parsed model breaks an invariant.
Network load_network(std::istream& source);
Network load_network_file(const std::string& path);

/// Emits the case format with full double precision; load_network of the
/// result reproduces the Network exactly.
std::string serialize_network(const Network& net);

/// Every invariant violation in the model, not just the first. Empty when valid.
std::vector<std::string> validate(const Network& net);

/// Throws ValidationError listing all violations; no-op on a valid model.
void require_valid(const Network& net);

/// Per-bus shunt admittance vector: entry i is j*shunt_b(i).
std::vector<std::complex<double>> apply_shunts(const Network& net);

}  // namespace gridloss
