#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "warnfix/decide.hpp"
#include "warnfix/patch.hpp"

namespace warnfix {

struct RepairConfig {
    int max_iterations = 3;
    int sample_count = 13;
    double temperature = 0.7;
    int quiescence_ms = 500;
    int diagnostics_deadline_ms = 30000;
    bool dry_run = false;
    std::set<std::string> dataloss_codes = default_dataloss_codes();
    std::string workspace;  // where the cast utility header lands
};

enum class RepairStatus { Success, Failure };

struct ValidationOutcome {
    std::string unit_id;
    std::string file;
    RepairStatus status = RepairStatus::Failure;
    int iterations_used = 0;
    std::vector<Diagnostic> residual;
    std::vector<Patch> patch_history;
    std::optional<RangeCheckDecision> decision;
    std::optional<FixStrategy> final_strategy;
    std::optional<std::string> failure_cause;
    std::optional<std::string> note;
    int warning_count = 0;

    nlohmann::ordered_json to_json() const;
};

// Algorithm-1 loop for one unit: assemble, decide, patch, then validate and
// correct against fresh diagnostics until clean or max_iterations corrections
// have been applied. Disk is written only on Success (and never with dry_run);
// on Failure the overlay rolls back and the on-disk file is untouched.
ValidationOutcome repair_unit(const FixUnit& unit, lsp::LspFacade& lsp, ModelGateway& gateway,
                              const RepairConfig& cfg);

// Deterministic (file, line) order; units within one file run sequentially
// against the evolving content (anchors re-resolve after each success); a
// failure never blocks later units. `jobs` bounds concurrent files.
std::vector<ValidationOutcome> repair_all(const std::vector<FixUnit>& units, lsp::LspFacade& lsp,
                                          ModelGateway& gateway, const RepairConfig& cfg,
                                          int jobs = 1);

}  // namespace warnfix
