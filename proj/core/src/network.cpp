#include "gridloss/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <unordered_set>

namespace gridloss {

const char* to_string(BusKind kind) {
    switch (kind) {
        case BusKind::Slack: return "slack";
        case BusKind::Generator: return "gen";
        case BusKind::Load: return "load";
    }
    return "?";
}

int Network::index_of(int bus_id) const {
    for (int i = 0; i < size(); ++i) {
        if (buses[i].id == bus_id) return i;
    }
    return -1;
}

int Network::branch_between(int from_id, int to_id) const {
    for (std::size_t k = 0; k < branches.size(); ++k) {
        if (branches[k].from_bus == from_id && branches[k].to_bus == to_id) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

int Network::slack_index() const {
    for (int i = 0; i < size(); ++i) {
        if (buses[i].kind == BusKind::Slack) return i;
    }
    return -1;
}

ParseError::ParseError(int line_number, const std::string& what)
    : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
      line(line_number) {}

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

ValidationError::ValidationError(const std::vector<std::string>& violations_in)
    : std::runtime_error("invalid network: " + join(violations_in, "; ")),
      violations(violations_in) {}

namespace {

// strips comments, returns whitespace tokens
std::vector<std::string> tokenize(const std::string& line) {
    std::string body = line;
    if (auto pos = body.find('#'); pos != std::string::npos) body.erase(pos);
    std::istringstream in(body);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

double parse_double(const std::string& tok, int line, const char* field) {
    // locale-independent: strtod with the classic locale assumption; the case
    // format only ever contains '.' decimal points
    const char* begin = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + tok.size() || !std::isfinite(v)) {
        throw ParseError(line, std::string("bad ") + field + " value '" + tok + "'");
    }
    return v;
}

int parse_int(const std::string& tok, int line, const char* field) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    long v = std::strtol(begin, &end, 10);
    if (end != begin + tok.size()) {
        throw ParseError(line, std::string("bad ") + field + " value '" + tok + "'");
    }
    return static_cast<int>(v);
}

BusKind parse_kind(const std::string& tok, int line) {
    if (tok == "slack") return BusKind::Slack;
    if (tok == "gen") return BusKind::Generator;
    if (tok == "load") return BusKind::Load;
    throw ParseError(line, "unknown bus kind '" + tok + "' (expected slack|gen|load)");
}

}  // namespace

Network load_network(std::istream& source) {
    Network net;
    net.base_mva = 0.0;

    enum class Section { None, System, Buses, Branches } section = Section::None;
    std::string line;
    int lineno = 0;
    bool have_base = false;

    // raw engineering-unit rows; converted to per-unit once base_mva is known
    struct RawBus { Bus b; int line; };
    std::vector<RawBus> raw_buses;
    std::vector<Branch> raw_branches;

    while (std::getline(source, line)) {
        ++lineno;
        auto toks = tokenize(line);
        if (toks.empty()) continue;

        if (toks[0] == "[system]") { section = Section::System; continue; }
        if (toks[0] == "[buses]") { section = Section::Buses; continue; }
        if (toks[0] == "[branches]") { section = Section::Branches; continue; }
        if (toks[0].front() == '[') throw ParseError(lineno, "unknown section " + toks[0]);

        switch (section) {
            case Section::None:
                throw ParseError(lineno, "data before any section header");
            case Section::System: {
                auto eq = toks[0].find('=');
                if (toks.size() != 1 || eq == std::string::npos) {
                    throw ParseError(lineno, "expected key=value in [system]");
                }
                auto key = toks[0].substr(0, eq);
                auto val = toks[0].substr(eq + 1);
                if (key == "base_mva") {
                    net.base_mva = parse_double(val, lineno, "base_mva");
                    if (net.base_mva <= 0) throw ParseError(lineno, "base_mva must be > 0");
                    have_base = true;
                } else {
                    throw ParseError(lineno, "unknown [system] key '" + key + "'");
                }
                break;
            }
            case Section::Buses: {
                if (toks.size() != 9) {
                    throw ParseError(lineno, "bus row needs 9 fields: id kind p_MW q_MVAR "
                                             "p_gen_MW v_set q_min_MVAR q_max_MVAR shunt_MVAR");
                }
                Bus b;
                b.id = parse_int(toks[0], lineno, "bus id");
                b.kind = parse_kind(toks[1], lineno);
                b.p_demand = parse_double(toks[2], lineno, "p_demand_MW");
                b.q_demand = parse_double(toks[3], lineno, "q_demand_MVAR");
                b.p_gen = parse_double(toks[4], lineno, "p_gen_MW");
                b.v_set = parse_double(toks[5], lineno, "v_set_pu");
                b.q_min = parse_double(toks[6], lineno, "q_min_MVAR");
                b.q_max = parse_double(toks[7], lineno, "q_max_MVAR");
                b.shunt_b = parse_double(toks[8], lineno, "shunt_MVAR");
                raw_buses.push_back({b, lineno});
                break;
            }
            case Section::Branches: {
                if (toks.size() != 6) {
                    throw ParseError(lineno, "branch row needs 6 fields: from to r_pu x_pu "
                                             "b_charging_pu tap");
                }
                Branch br;
                br.from_bus = parse_int(toks[0], lineno, "from bus");
                br.to_bus = parse_int(toks[1], lineno, "to bus");
                br.r = parse_double(toks[2], lineno, "r_pu");
                br.x = parse_double(toks[3], lineno, "x_pu");
                br.b_charging = parse_double(toks[4], lineno, "b_charging_pu");
                br.tap = parse_double(toks[5], lineno, "tap");
                raw_branches.push_back(br);
                break;
            }
        }
    }

    if (!have_base) throw ParseError(lineno, "missing [system] base_mva");

    for (auto& [b, bline] : raw_buses) {
        b.p_demand /= net.base_mva;
        b.q_demand /= net.base_mva;
        b.p_gen /= net.base_mva;
        b.q_min /= net.base_mva;
        b.q_max /= net.base_mva;
        b.shunt_b /= net.base_mva;
        net.buses.push_back(b);
    }
    net.branches = std::move(raw_branches);

    require_valid(net);
    return net;
}

Network load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open case file: " + path);
    return load_network(in);
}

std::string serialize_network(const Network& net) {
    auto full = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "[system]\n";
    out << "base_mva=" << full(net.base_mva) << "\n";
    out << "[buses]\n";
    out << "# id kind p_demand_MW q_demand_MVAR p_gen_MW v_set_pu q_min_MVAR q_max_MVAR shunt_MVAR\n";
    for (const auto& b : net.buses) {
        out << b.id << ' ' << to_string(b.kind)
            << ' ' << full(b.p_demand * net.base_mva)
            << ' ' << full(b.q_demand * net.base_mva)
            << ' ' << full(b.p_gen * net.base_mva)
            << ' ' << full(b.v_set)
            << ' ' << full(b.q_min * net.base_mva)
            << ' ' << full(b.q_max * net.base_mva)
            << ' ' << full(b.shunt_b * net.base_mva) << "\n";
    }
    out << "[branches]\n";
    out << "# from to r_pu x_pu b_charging_pu tap\n";
    for (const auto& br : net.branches) {
        out << br.from_bus << ' ' << br.to_bus
            << ' ' << full(br.r) << ' ' << full(br.x)
            << ' ' << full(br.b_charging) << ' ' << full(br.tap) << "\n";
    }
    return out.str();
}

std::vector<std::string> validate(const Network& net) {
    std::vector<std::string> out;
    auto add = [&out](std::string s) { out.push_back(std::move(s)); };

    if (net.base_mva <= 0) add("base_mva must be positive");
    if (net.buses.empty()) add("network has no buses");

    std::unordered_set<int> seen;
    std::vector<int> slack_ids;
    for (const auto& b : net.buses) {
        if (!seen.insert(b.id).second) add("duplicate bus id " + std::to_string(b.id));
        if (b.kind == BusKind::Slack) slack_ids.push_back(b.id);
        if (b.q_min > b.q_max) {
            add("bus " + std::to_string(b.id) + ": q_min > q_max");
        }
        if ((b.kind == BusKind::Slack || b.kind == BusKind::Generator) && !(b.v_set > 0)) {
            add("bus " + std::to_string(b.id) + ": v_set must be > 0 for slack/generator");
        }
        if (!std::isfinite(b.p_demand) || !std::isfinite(b.q_demand)) {
            add("bus " + std::to_string(b.id) + ": non-finite demand");
        }
    }
    if (slack_ids.empty()) {
        add("no slack bus");
    } else if (slack_ids.size() > 1) {
        std::string ids;
        for (std::size_t i = 0; i < slack_ids.size(); ++i) {
            if (i) ids += ", ";
            ids += std::to_string(slack_ids[i]);
        }
        add("multiple slack buses: " + ids);
    }

    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        const auto& br = net.branches[k];
        std::string tag = "branch " + std::to_string(br.from_bus) + "-"
                          + std::to_string(br.to_bus);
        if (br.from_bus == br.to_bus) add(tag + ": from and to are the same bus");
        if (net.index_of(br.from_bus) < 0) {
            add(tag + ": endpoint bus " + std::to_string(br.from_bus) + " does not exist");
        }
        if (net.index_of(br.to_bus) < 0) {
            add(tag + ": endpoint bus " + std::to_string(br.to_bus) + " does not exist");
        }
        if (br.r < 0) add(tag + ": negative resistance");
        if (br.r == 0.0 && br.x == 0.0) add(tag + ": degenerate impedance (r = x = 0)");
        if (!(br.tap > 0)) add(tag + ": tap must be > 0");
    }

    // connectivity over valid endpoints
    if (!net.buses.empty()) {
        std::vector<int> comp(net.buses.size(), -1);
        std::vector<int> stack{0};
        comp[0] = 0;
        while (!stack.empty()) {
            int i = stack.back();
            stack.pop_back();
            for (const auto& br : net.branches) {
                int a = net.index_of(br.from_bus);
                int b = net.index_of(br.to_bus);
                if (a < 0 || b < 0) continue;
                int other = -1;
                if (a == i) other = b;
                if (b == i) other = a;
                if (other >= 0 && comp[other] < 0) {
                    comp[other] = 0;
                    stack.push_back(other);
                }
            }
        }
        for (std::size_t i = 0; i < comp.size(); ++i) {
            if (comp[i] < 0 && net.buses.size() > 1) {
                add("bus " + std::to_string(net.buses[i].id) + " is islanded");
            }
        }
    }
    return out;
}

void require_valid(const Network& net) {
    auto violations = validate(net);
    if (!violations.empty()) throw ValidationError(violations);
}

std::vector<std::complex<double>> apply_shunts(const Network& net) {
    std::vector<std::complex<double>> out(net.buses.size());
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        out[i] = std::complex<double>(0.0, net.buses[i].shunt_b);
    }
    return out;
}

}  // namespace gridloss
