#include "gridloss/report.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace gridloss {

namespace {

constexpr double kRadToDeg = 57.29577951308232;

using nlohmann::json;

}  // namespace

ReportFormat parse_format(const std::string& name) {
    if (name == "table") return ReportFormat::Table;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    throw std::invalid_argument("unknown format '" + name + "' (expected table|csv|json)");
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string iso8601_utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunManifest make_manifest(const std::string& command, const std::string& case_path,
                          std::string_view case_bytes, const std::string& options) {
    RunManifest m;
    m.command = command;
    m.case_path = case_path;
    m.case_hash = fnv1a64_hex(case_bytes);
    m.options = options;
    m.tool_version = kVersion;
    m.timestamp = iso8601_utc_now();
    return m;
}

namespace {

std::string manifest_lines(const RunManifest& m, const char* prefix) {
    std::ostringstream out;
    out << prefix << "command: " << m.command << "\n";
    out << prefix << "case: " << m.case_path << " (fnv1a64 " << m.case_hash << ")\n";
    out << prefix << "options: " << m.options << "\n";
    for (const auto& s : m.strategies) out << prefix << "strategy: " << s << "\n";
    if (!m.ga_config.empty()) out << prefix << "ga-config: " << m.ga_config << "\n";
    out << prefix << "version: " << m.tool_version << "\n";
    out << prefix << "timestamp: " << m.timestamp << "\n";
    return out.str();
}

json manifest_json(const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["case_path"] = m.case_path;
    j["case_hash"] = m.case_hash;
    j["options"] = m.options;
    j["strategies"] = m.strategies;
    j["ga_config"] = m.ga_config;
    j["tool_version"] = m.tool_version;
    j["timestamp"] = m.timestamp;
    return j;
}

std::string pad(const std::string& s, int width) {
    if (static_cast<int>(s.size()) >= width) return s;
    return std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string render_solve_report(const Network& net, const LoadFlowSolution& sol,
                                const LossReport& losses, const RunManifest& manifest,
                                ReportFormat format) {
    const double base = net.base_mva;
    if (format == ReportFormat::Json) {
        json j;
        j["manifest"] = manifest_json(manifest);
        j["converged"] = sol.converged;
        j["iterations"] = sol.iterations;
        j["mismatch_trace"] = sol.mismatch_trace;
        json buses = json::array();
        for (int i = 0; i < net.size(); ++i) {
            const auto& b = net.buses[i];
            buses.push_back({
                {"id", b.id},
                {"kind", to_string(b.kind)},
                {"v_pu", sol.state.v_mag(i)},
                {"angle_deg", sol.state.v_ang(i) * kRadToDeg},
                {"p_injection_mw", sol.p_injection(i) * base},
                {"q_injection_mvar", sol.q_injection(i) * base},
            });
        }
        j["buses"] = std::move(buses);
        json branches = json::array();
        for (const auto& f : losses.branch_flows) {
            const auto& br = net.branches[f.branch_index];
            branches.push_back({
                {"from", br.from_bus},
                {"to", br.to_bus},
                {"p_from_mw", f.s_from.real() * base},
                {"q_from_mvar", f.s_from.imag() * base},
                {"p_to_mw", f.s_to.real() * base},
                {"q_to_mvar", f.s_to.imag() * base},
                {"p_loss_mw", f.p_loss * base},
                {"q_loss_mvar", f.q_loss * base},
            });
        }
        j["branches"] = std::move(branches);
        j["totals"] = {
            {"p_loss_mw", losses.total_p_loss_mw},
            {"q_loss_mvar", losses.total_q_loss_mvar},
            {"q_net_mvar", losses.total_q_net_mvar},
            {"charging_mvar", losses.charging_mvar},
            {"shunt_mvar", losses.shunt_mvar},
            {"gen_p_mw", losses.gen_p_mw},
            {"gen_q_mvar", losses.gen_q_mvar},
            {"load_p_mw", losses.load_p_mw},
            {"load_q_mvar", losses.load_q_mvar},
        };
        json switches = json::array();
        for (const auto& s : sol.q_limit_switches) {
            switches.push_back({{"bus", s.bus_id},
                                {"iteration", s.iteration},
                                {"limit", s.at_upper ? "upper" : "lower"}});
        }
        j["q_limit_switches"] = std::move(switches);
        return j.dump(2) + "\n";
    }

    if (format == ReportFormat::Csv) {
        std::ostringstream out;
        out << manifest_lines(manifest, "# ");
        out << "table,bus\n";
        out << "id,kind,v_pu,angle_deg,p_injection_mw,q_injection_mvar\n";
        for (int i = 0; i < net.size(); ++i) {
            const auto& b = net.buses[i];
            out << b.id << ',' << to_string(b.kind) << ','
                << fmt_full(sol.state.v_mag(i)) << ','
                << fmt_full(sol.state.v_ang(i) * kRadToDeg) << ','
                << fmt_full(sol.p_injection(i) * base) << ','
                << fmt_full(sol.q_injection(i) * base) << "\n";
        }
        out << "table,branch\n";
        out << "from,to,p_from_mw,q_from_mvar,p_to_mw,q_to_mvar,p_loss_mw,q_loss_mvar\n";
        for (const auto& f : losses.branch_flows) {
            const auto& br = net.branches[f.branch_index];
            out << br.from_bus << ',' << br.to_bus << ','
                << fmt_full(f.s_from.real() * base) << ','
                << fmt_full(f.s_from.imag() * base) << ','
                << fmt_full(f.s_to.real() * base) << ','
                << fmt_full(f.s_to.imag() * base) << ','
                << fmt_full(f.p_loss * base) << ','
                << fmt_full(f.q_loss * base) << "\n";
        }
        out << "table,totals\n";
        out << "key,value\n";
        out << "converged," << (sol.converged ? 1 : 0) << "\n";
        out << "iterations," << sol.iterations << "\n";
        out << "p_loss_mw," << fmt_full(losses.total_p_loss_mw) << "\n";
        out << "q_loss_mvar," << fmt_full(losses.total_q_loss_mvar) << "\n";
        out << "q_net_mvar," << fmt_full(losses.total_q_net_mvar) << "\n";
        out << "charging_mvar," << fmt_full(losses.charging_mvar) << "\n";
        out << "shunt_mvar," << fmt_full(losses.shunt_mvar) << "\n";
        out << "gen_p_mw," << fmt_full(losses.gen_p_mw) << "\n";
        out << "gen_q_mvar," << fmt_full(losses.gen_q_mvar) << "\n";
        out << "load_p_mw," << fmt_full(losses.load_p_mw) << "\n";
        out << "load_q_mvar," << fmt_full(losses.load_q_mvar) << "\n";
        return out.str();
    }

    std::ostringstream out;
    out << manifest_lines(manifest, "# ");
    out << (sol.converged ? "converged" : "NOT CONVERGED") << " after "
        << sol.iterations << " iterations\n\n";
    out << "bus voltages\n";
    out << pad("bus", 5) << pad("kind", 7) << pad("V(pu)", 10) << pad("angle(deg)", 12)
        << pad("P(MW)", 12) << pad("Q(MVAR)", 12) << "\n";
    for (int i = 0; i < net.size(); ++i) {
        const auto& b = net.buses[i];
        out << pad(std::to_string(b.id), 5) << pad(to_string(b.kind), 7)
            << pad(fmt_sig(sol.state.v_mag(i)), 10)
            << pad(fmt_sig(sol.state.v_ang(i) * kRadToDeg), 12)
            << pad(fmt_sig(sol.p_injection(i) * base), 12)
            << pad(fmt_sig(sol.q_injection(i) * base), 12) << "\n";
    }
    out << "\nbranch losses\n";
    out << pad("from", 6) << pad("to", 5) << pad("P_loss(MW)", 12)
        << pad("Q_loss(MVAR)", 14) << "\n";
    for (const auto& f : losses.branch_flows) {
        const auto& br = net.branches[f.branch_index];
        out << pad(std::to_string(br.from_bus), 6) << pad(std::to_string(br.to_bus), 5)
            << pad(fmt_sig(f.p_loss * base), 12) << pad(fmt_sig(f.q_loss * base), 14)
            << "\n";
    }
    out << "\ntotals\n";
    out << "  P_loss_MW=" << fmt_sig(losses.total_p_loss_mw)
        << " Q_loss_MVAR=" << fmt_sig(losses.total_q_loss_mvar) << "\n";
    out << "  generation " << fmt_sig(losses.gen_p_mw) << " MW / "
        << fmt_sig(losses.gen_q_mvar) << " MVAR\n";
    out << "  load       " << fmt_sig(losses.load_p_mw) << " MW / "
        << fmt_sig(losses.load_q_mvar) << " MVAR\n";
    out << "  charging " << fmt_sig(losses.charging_mvar) << " MVAR, shunts "
        << fmt_sig(losses.shunt_mvar) << " MVAR, net branch Q "
        << fmt_sig(losses.total_q_net_mvar) << " MVAR\n";
    if (!sol.q_limit_switches.empty()) {
        out << "  q-limit switches:";
        for (const auto& s : sol.q_limit_switches) {
            out << " bus " << s.bus_id << "@" << s.iteration
                << (s.at_upper ? "(max)" : "(min)");
        }
        out << "\n";
    }
    return out.str();
}

std::string render_comparison(const std::vector<ScenarioResult>& rows,
                              const RunManifest& manifest, ReportFormat format) {
    if (format == ReportFormat::Json) {
        json j;
        j["manifest"] = manifest_json(manifest);
        json arr = json::array();
        for (const auto& r : rows) {
            arr.push_back({
                {"scenario", r.name},
                {"converged", r.converged},
                {"p_loss_mw", r.p_loss_mw},
                {"q_loss_mvar", r.q_loss_mvar},
                {"delta_p_mw", r.delta_p_mw},
                {"min_voltage_bus", r.min_voltage_bus},
                {"min_voltage_pu", r.min_voltage},
            });
        }
        j["scenarios"] = std::move(arr);
        return j.dump(2) + "\n";
    }
    if (format == ReportFormat::Csv) {
        std::ostringstream out;
        out << manifest_lines(manifest, "# ");
        out << "scenario,converged,p_loss_mw,q_loss_mvar,delta_p_mw,min_voltage_bus,"
               "min_voltage_pu\n";
        for (const auto& r : rows) {
            out << '"' << r.name << "\"," << (r.converged ? 1 : 0) << ','
                << fmt_full(r.p_loss_mw) << ',' << fmt_full(r.q_loss_mvar) << ','
                << fmt_full(r.delta_p_mw) << ',' << r.min_voltage_bus << ','
                << fmt_full(r.min_voltage) << "\n";
        }
        return out.str();
    }
    std::ostringstream out;
    out << manifest_lines(manifest, "# ");
    out << pad("scenario", 28) << pad("conv", 6) << pad("P_loss(MW)", 12)
        << pad("Q_loss(MVAR)", 14) << pad("dP(MW)", 10) << pad("minV bus", 10)
        << pad("minV(pu)", 10) << "\n";
    for (const auto& r : rows) {
        out << pad(r.name, 28) << pad(r.converged ? "yes" : "NO", 6)
            << pad(fmt_sig(r.p_loss_mw), 12) << pad(fmt_sig(r.q_loss_mvar), 14)
            << pad(fmt_sig(r.delta_p_mw), 10) << pad(std::to_string(r.min_voltage_bus), 10)
            << pad(fmt_sig(r.min_voltage), 10) << "\n";
    }
    return out.str();
}

namespace {

struct BarGroup {
    std::string name;
    std::vector<double> values;  // one per series
};

// static grouped-bar SVG; no scripting, one <g class="bar-group"> per group
std::string bar_chart_svg(const std::string& title, const std::vector<std::string>& series,
                          const std::vector<BarGroup>& groups, const RunManifest& manifest) {
    const int width = 720, height = 420;
    const int ml = 60, mr = 20, mt = 40, mb = 80;
    const double plot_w = width - ml - mr;
    const double plot_h = height - mt - mb;

    double vmax = 0.0;
    for (const auto& g : groups) {
        for (double v : g.values) vmax = std::max(vmax, v);
    }
    if (vmax <= 0.0) vmax = 1.0;
    vmax *= 1.1;

    const char* palette[] = {"#3b6ea5", "#c0504d", "#9bbb59", "#8064a2"};
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    out << "<desc>\n" << manifest_lines(manifest, "") << "</desc>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\"" << width - mr
        << "\" y2=\"" << mt + plot_h << "\" stroke=\"#333\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << mt + plot_h << "\" stroke=\"#333\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = vmax * t / 4.0;
        const double y = mt + plot_h - plot_h * t / 4.0;
        out << "<text x=\"" << ml - 6 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_sig(v) << "</text>\n";
    }

    const double group_w = plot_w / std::max<std::size_t>(1, groups.size());
    const std::size_t nseries = series.size();
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& g = groups[gi];
        const double gx = ml + group_w * gi;
        const double bar_w = group_w * 0.8 / std::max<std::size_t>(1, nseries);
        out << "<g class=\"bar-group\" data-name=\"" << g.name << "\">\n";
        for (std::size_t si = 0; si < g.values.size(); ++si) {
            const double h = plot_h * g.values[si] / vmax;
            const double x = gx + group_w * 0.1 + bar_w * si;
            const double y = mt + plot_h - h;
            out << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w * 0.92
                << "\" height=\"" << h << "\" fill=\"" << palette[si % 4] << "\"/>\n";
            out << "  <text x=\"" << x + bar_w * 0.46 << "\" y=\"" << y - 3
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                   "font-size=\"10\">" << fmt_sig(g.values[si]) << "</text>\n";
        }
        out << "  <text x=\"" << gx + group_w / 2 << "\" y=\"" << mt + plot_h + 14
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
               "transform=\"rotate(20 " << gx + group_w / 2 << " " << mt + plot_h + 14
            << ")\">" << g.name << "</text>\n";
        out << "</g>\n";
    }
    for (std::size_t si = 0; si < nseries; ++si) {
        const double x = ml + 10 + 140.0 * si;
        out << "<rect x=\"" << x << "\" y=\"" << height - 22 << "\" width=\"12\" "
            << "height=\"12\" fill=\"" << palette[si % 4] << "\"/>\n";
        out << "<text x=\"" << x + 16 << "\" y=\"" << height - 12
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[si]
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace

std::string comparison_svg(const std::vector<ScenarioResult>& rows,
                           const RunManifest& manifest) {
    std::vector<BarGroup> groups;
    for (const auto& r : rows) {
        groups.push_back({r.name, {r.p_loss_mw, r.q_loss_mvar}});
    }
    return bar_chart_svg("Line losses by scenario", {"P loss (MW)", "Q loss (MVAR)"},
                         groups, manifest);
}

std::string branch_loss_svg(const Network& net, const LossReport& losses,
                            const RunManifest& manifest) {
    std::vector<BarGroup> groups;
    for (const auto& f : losses.branch_flows) {
        const auto& br = net.branches[f.branch_index];
        groups.push_back({std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus),
                          {f.p_loss * net.base_mva, f.q_loss * net.base_mva}});
    }
    return bar_chart_svg("Per-branch losses", {"P loss (MW)", "Q loss (MVAR)"}, groups,
                         manifest);
}

std::string render_opf_report(const std::vector<OpfRunSummary>& runs,
                              const OpfResult& best, const Network& best_net,
                              const RunManifest& manifest, ReportFormat format) {
    double mean = 0.0;
    for (const auto& r : runs) mean += r.best_loss_mw;
    if (!runs.empty()) mean /= static_cast<double>(runs.size());

    if (format == ReportFormat::Json) {
        json j;
        j["manifest"] = manifest_json(manifest);
        json arr = json::array();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            arr.push_back({{"run", i + 1},
                           {"seed", runs[i].seed},
                           {"best_loss_mw", runs[i].best_loss_mw},
                           {"evaluations", runs[i].evaluations}});
        }
        j["runs"] = std::move(arr);
        j["mean_best_loss_mw"] = mean;
        j["best"] = {
            {"loss_mw", best.best_loss_mw},
            {"controls", best.best_controls},
            {"converged", best.solution.converged},
        };
        json volt = json::array();
        for (int i = 0; i < best_net.size(); ++i) {
            volt.push_back({{"id", best_net.buses[i].id},
                            {"v_pu", best.solution.state.v_mag(i)},
                            {"angle_deg", best.solution.state.v_ang(i) * kRadToDeg}});
        }
        j["best"]["bus_voltages"] = std::move(volt);
        return j.dump(2) + "\n";
    }
    if (format == ReportFormat::Csv) {
        std::ostringstream out;
        out << manifest_lines(manifest, "# ");
        out << "run,seed,best_loss_mw,evaluations\n";
        for (std::size_t i = 0; i < runs.size(); ++i) {
            out << (i + 1) << ',' << runs[i].seed << ',' << fmt_full(runs[i].best_loss_mw)
                << ',' << runs[i].evaluations << "\n";
        }
        out << "mean,," << fmt_full(mean) << ",\n";
        return out.str();
    }
    std::ostringstream out;
    out << manifest_lines(manifest, "# ");
    out << pad("run", 5) << pad("seed", 12) << pad("best loss (MW)", 16)
        << pad("evaluations", 13) << "\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        out << pad(std::to_string(i + 1), 5) << pad(std::to_string(runs[i].seed), 12)
            << pad(fmt_sig(runs[i].best_loss_mw), 16)
            << pad(std::to_string(runs[i].evaluations), 13) << "\n";
    }
    out << pad("mean", 5) << pad("", 12) << pad(fmt_sig(mean), 16) << "\n";
    out << "\nbest run: loss " << fmt_sig(best.best_loss_mw) << " MW, decoded controls:";
    for (double v : best.best_controls) out << ' ' << fmt_sig(v);
    out << "\n";
    return out.str();
}

std::string opf_history_csv(const OpfResult& result, const RunManifest& manifest) {
    std::ostringstream out;
    out << manifest_lines(manifest, "# ");
    out << "generation,best_fitness,mean_fitness,best_loss_mw\n";
    for (std::size_t g = 0; g < result.history.size(); ++g) {
        const auto& h = result.history[g];
        out << g << ',' << fmt_full(h.best_fitness) << ',' << fmt_full(h.mean_fitness)
            << ',' << fmt_full(h.best_loss_mw) << "\n";
    }
    return out.str();
}

std::string ybus_csv(const Network& net, const AdmittanceMatrix& ybus) {
    std::ostringstream out;
    out << "i,j,g,b\n";
    for (int i = 0; i < ybus.size(); ++i) {
        for (int j = 0; j < ybus.size(); ++j) {
            const auto y = ybus.y(i, j);
            if (y == std::complex<double>(0.0, 0.0)) continue;
            out << net.buses[i].id << ',' << net.buses[j].id << ',' << fmt_full(y.real())
                << ',' << fmt_full(y.imag()) << "\n";
        }
    }
    return out.str();
}

}  // namespace gridloss
