#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "warnfix/repair.hpp"

namespace warnfix {

struct RunReport {
    int total_warnings = 0;
    int total_units = 0;
    int succeeded = 0;
    int failed = 0;
    int overhead_ours = 0;      // units whose patch adds instructions
    int overhead_baseline = 0;  // = succeeded units; the baseline checks everything
    std::map<std::string, int> per_strategy_counts;
};

struct ManifestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunReport report_from_outcomes(const std::vector<ValidationOutcome>& outcomes);

// Manifest: one JSON line per outcome plus a trailing summary record. Reading
// recomputes the counts and rejects a summary that disagrees (or violates the
// report invariants).
std::string manifest_text(const std::vector<ValidationOutcome>& outcomes,
                          const RunReport& report);
nlohmann::ordered_json report_to_json(const RunReport& report,
                                      std::optional<int> optimal_overhead = std::nullopt);
RunReport load_manifest(const std::string& path);

// Overhead count of a manifest used as the human-optimal reference.
int optimal_overhead_from_manifest(const std::string& path);

// Text table and JSON renderings carry identical numbers; percentages are
// printed to one decimal.
std::string render_text(const RunReport& report, std::optional<int> optimal_overhead = std::nullopt);

std::string format_percent(long long numerator, long long denominator);

}  // namespace warnfix
