#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gridloss/admittance.hpp"
#include "gridloss/ga.hpp"
#include "gridloss/loss.hpp"
#include "gridloss/network.hpp"
#include "gridloss/solver.hpp"
#include "gridloss/strategies.hpp"

namespace gridloss {

/// Everything needed to re-run the command that produced a report. Every
/// emitted report embeds one (table/CSV as comment lines, JSON as an object,
/// SVG inside <desc>).
struct RunManifest {
    std::string command;
    std::string case_path;
    std::string case_hash;   // fnv1a-64 over the raw case-file bytes, hex
    std::string options;     // serialized solver/GA flags
    std::vector<std::string> strategies;
    std::string ga_config;   // config path or "builtin"
    std::string tool_version;
    std::string timestamp;   // ISO-8601 UTC
};

enum class ReportFormat { Table, Csv, Json };

/// Accepts "table", "csv", "json"; throws std::invalid_argument otherwise.
ReportFormat parse_format(const std::string& name);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);
std::string iso8601_utc_now();

/// 6 significant digits for human tables.
std::string fmt_sig(double v);
/// Full round-trip precision for machine output.
std::string fmt_full(double v);

RunManifest make_manifest(const std::string& command, const std::string& case_path,
                          std::string_view case_bytes, const std::string& options);

/// Voltage/angle table, per-branch flow and loss table, totals and balance.
std::string render_solve_report(const Network& net, const LoadFlowSolution& sol,
                                const LossReport& losses, const RunManifest& manifest,
                                ReportFormat format);

/// Scenario comparison rows, base first.
std::string render_comparison(const std::vector<ScenarioResult>& rows,
                              const RunManifest& manifest, ReportFormat format);

/// Grouped real/reactive loss bars, one group per scenario.
std::string comparison_svg(const std::vector<ScenarioResult>& rows,
                           const RunManifest& manifest);

/// Per-branch real loss bars for a solved case.
std::string branch_loss_svg(const Network& net, const LossReport& losses,
                            const RunManifest& manifest);

struct OpfRunSummary {
    std::uint64_t seed = 0;
    double best_loss_mw = 0.0;
    std::int64_t evaluations = 0;
};

/// Per-run best losses, their mean, and the best run's solution report.
std::string render_opf_report(const std::vector<OpfRunSummary>& runs,
                              const OpfResult& best, const Network& best_net,
                              const RunManifest& manifest, ReportFormat format);

/// Generation, best fitness, mean fitness, best-ever loss rows.
std::string opf_history_csv(const OpfResult& result, const RunManifest& manifest);

/// `i,j,g,b` rows for the nonzero entries, external bus ids.
std::string ybus_csv(const Network& net, const AdmittanceMatrix& ybus);

}  // namespace gridloss
