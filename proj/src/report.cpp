#include "warnfix/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "warnfix/util.hpp"

namespace warnfix {

using nlohmann::json;
using nlohmann::ordered_json;

RunReport report_from_outcomes(const std::vector<ValidationOutcome>& outcomes) {
    RunReport r;
    r.total_units = static_cast<int>(outcomes.size());
    for (const ValidationOutcome& o : outcomes) {
        r.total_warnings += o.warning_count;
        if (o.status == RepairStatus::Success) {
            ++r.succeeded;
            if (o.final_strategy) {
                r.per_strategy_counts[strategy_name(*o.final_strategy)]++;
                if (*o.final_strategy == FixStrategy::SafeIntCast) ++r.overhead_ours;
            }
        } else {
            ++r.failed;
        }
    }
    r.overhead_baseline = r.succeeded;
    return r;
}

std::string format_percent(long long numerator, long long denominator) {
    if (denominator == 0) return "0.0%";
    double pct = 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", pct);
    return buf;
}

ordered_json report_to_json(const RunReport& r, std::optional<int> optimal_overhead) {
    ordered_json j;
    j["type"] = "summary";
    j["total_warnings"] = r.total_warnings;
    j["total_units"] = r.total_units;
    j["succeeded"] = r.succeeded;
    j["failed"] = r.failed;
    j["overhead_ours"] = r.overhead_ours;
    j["overhead_baseline"] = r.overhead_baseline;
    j["per_strategy_counts"] = r.per_strategy_counts;
    j["overhead_reduction_vs_baseline"] =
        format_percent(r.overhead_baseline - r.overhead_ours, r.overhead_baseline);
    if (optimal_overhead) {
        j["overhead_optimal"] = *optimal_overhead;
        j["overhead_gap_to_optimal"] =
            format_percent(r.overhead_ours - *optimal_overhead, r.overhead_baseline);
    }
    return j;
}

std::string manifest_text(const std::vector<ValidationOutcome>& outcomes,
                          const RunReport& report) {
    std::string out;
    for (const ValidationOutcome& o : outcomes) {
        out += o.to_json().dump();
        out += '\n';
    }
    out += report_to_json(report).dump();
    out += '\n';
    return out;
}

RunReport load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest: " + path);

    RunReport computed;
    std::optional<RunReport> declared;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ManifestError("manifest line " + std::to_string(lineno) +
                                " is not JSON: " + e.what());
        }
        std::string type = j.value("type", "");
        if (type == "outcome") {
            computed.total_units++;
            computed.total_warnings += j.value("warnings", 1);
            std::string status = j.value("status", "");
            if (status == "success") {
                computed.succeeded++;
                if (!j.value("strategy", json()).is_null()) {
                    std::string strat = j.value("strategy", "");
                    if (!strategy_from_name(strat)) {
                        throw ManifestError("manifest line " + std::to_string(lineno) +
                                            ": unknown strategy '" + strat + "'");
                    }
                    computed.per_strategy_counts[strat]++;
                    bool adds = j.value("adds_instructions", false);
                    if (adds != (strat == "safe_int_cast")) {
                        throw ManifestError("manifest line " + std::to_string(lineno) +
                                            ": adds_instructions disagrees with strategy");
                    }
                    if (adds) computed.overhead_ours++;
                }
            } else if (status == "failure") {
                computed.failed++;
            } else {
                throw ManifestError("manifest line " + std::to_string(lineno) +
                                    ": bad status '" + status + "'");
            }
        } else if (type == "summary") {
            RunReport d;
            d.total_warnings = j.value("total_warnings", 0);
            d.total_units = j.value("total_units", 0);
            d.succeeded = j.value("succeeded", 0);
            d.failed = j.value("failed", 0);
            d.overhead_ours = j.value("overhead_ours", 0);
            d.overhead_baseline = j.value("overhead_baseline", 0);
            if (j.contains("per_strategy_counts")) {
                for (auto& [k, v] : j["per_strategy_counts"].items()) {
                    d.per_strategy_counts[k] = v.get<int>();
                }
            }
            declared = d;
        }
    }
    computed.overhead_baseline = computed.succeeded;

    const RunReport& r = declared ? *declared : computed;
    if (declared) {
        if (declared->total_units != computed.total_units ||
            declared->succeeded != computed.succeeded ||
            declared->failed != computed.failed ||
            declared->overhead_ours != computed.overhead_ours) {
            throw ManifestError("manifest summary disagrees with its outcome records");
        }
    }
    if (r.succeeded + r.failed != r.total_units) {
        throw ManifestError("manifest violates succeeded + failed = total_units");
    }
    if (r.overhead_ours > r.overhead_baseline) {
        throw ManifestError("manifest violates overhead_ours <= overhead_baseline");
    }
    return r;
}

int optimal_overhead_from_manifest(const std::string& path) {
    return load_manifest(path).overhead_ours;
}

std::string render_text(const RunReport& r, std::optional<int> optimal_overhead) {
    std::ostringstream out;
    out << "warnfix run report\n";
    out << "------------------\n";
    out << "total warnings        " << r.total_warnings << "\n";
    out << "fix units             " << r.total_units << "\n";
    out << "succeeded             " << r.succeeded << "\n";
    out << "failed                " << r.failed << "\n";
    out << "per-strategy counts\n";
    for (const auto& [name, count] : r.per_strategy_counts) {
        out << "  " << name << std::string(name.size() < 20 ? 20 - name.size() : 1, ' ')
            << count << "\n";
    }
    out << "overhead (adds instructions)\n";
    out << "  baseline            " << r.overhead_baseline << "\n";
    out << "  ours                " << r.overhead_ours << "\n";
    out << "  reduction vs. baseline  "
        << format_percent(r.overhead_baseline - r.overhead_ours, r.overhead_baseline) << "\n";
    if (optimal_overhead) {
        out << "  optimal             " << *optimal_overhead << "\n";
        out << "  gap to optimal      "
            << format_percent(r.overhead_ours - *optimal_overhead, r.overhead_baseline) << "\n";
    }
    return out.str();
}

}  // namespace warnfix
