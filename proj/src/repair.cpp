#include "warnfix/repair.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <thread>

#include "warnfix/cst.hpp"
#include "warnfix/util.hpp"

namespace warnfix {

using nlohmann::ordered_json;

namespace {

bool is_dataloss(const Diagnostic& d, const RepairConfig& cfg) {
    return classify(d, cfg.dataloss_codes).variant == WarningVariant::ImplicitDataLoss;
}

// "diagnostics is empty" for Algorithm 1: no errors anywhere in the file and no
// data-loss warning left inside the unit's (current) function span.
bool diagnostics_clean(const std::vector<Diagnostic>& diags, const std::optional<LineSpan>& span,
                       const RepairConfig& cfg) {
    for (const Diagnostic& d : diags) {
        if (d.severity == Severity::Error) return false;
        if (!is_dataloss(d, cfg)) continue;
        if (!span || span->contains(d.range.start.line)) return false;
    }
    return true;
}

// Diagnostics Algorithm 1 should look at: errors plus in-span data-loss warnings.
std::vector<Diagnostic> relevant_diagnostics(const std::vector<Diagnostic>& diags,
                                             const std::optional<LineSpan>& span,
                                             const RepairConfig& cfg) {
    std::vector<Diagnostic> out;
    for (const Diagnostic& d : diags) {
        if (d.severity == Severity::Error) {
            out.push_back(d);
        } else if (is_dataloss(d, cfg) && (!span || span->contains(d.range.start.line))) {
            out.push_back(d);
        }
    }
    return out;
}

std::optional<LineSpan> current_span(const std::string& text, int around_line) {
    auto callable = cst::innermost_enclosing(text, around_line);
    if (callable) return callable->span;
    return std::nullopt;
}

std::string snippet_text_for(const std::string& text, const LineSpan& span) {
    bool trailing = false;
    std::vector<std::string> lines = split_lines(text, &trailing);
    std::string out;
    for (int i = span.start_line; i <= span.end_line && i < static_cast<int>(lines.size());
         ++i) {
        out += lines[i];
        out += '\n';
    }
    return out;
}

ValidationOutcome fail_out(const FixUnit& unit, const std::string& cause) {
    ValidationOutcome out;
    out.unit_id = unit.id;
    out.file = unit.file;
    out.warning_count = static_cast<int>(unit.warnings.size());
    out.status = RepairStatus::Failure;
    out.iterations_used = 0;
    out.failure_cause = cause;
    return out;
}

}  // namespace

ValidationOutcome repair_unit(const FixUnit& unit, lsp::LspFacade& lsp, ModelGateway& gateway,
                              const RepairConfig& cfg) {
    ValidationOutcome out;
    out.unit_id = unit.id;
    out.file = unit.file;
    out.warning_count = static_cast<int>(unit.warnings.size());

    const std::string original_text = lsp.document_text(unit.file);
    auto rollback = [&] { lsp.change_document(unit.file, original_text); };

    WarningContext ctx;
    try {
        ctx = assemble(unit, lsp, gateway);
    } catch (const EmptyContext& e) {
        return fail_out(unit, std::string("empty context: ") + e.what());
    } catch (const lsp::LspError& e) {
        return fail_out(unit, std::string("lsp: ") + e.what());
    }

    RangeCheckDecision verdict;
    try {
        verdict = decide(ctx, gateway, {cfg.sample_count, cfg.temperature});
    } catch (const GatewayError& e) {
        return fail_out(unit, std::string("gateway: ") + e.what());
    }
    out.decision = verdict;

    CastUtilityInfo util;
    if (verdict.verdict == Verdict::Needed && !cfg.dry_run && !cfg.workspace.empty()) {
        try {
            ensure_cast_utility(cfg.workspace);
        } catch (const std::exception& e) {
            return fail_out(unit, std::string("cast utility: ") + e.what());
        }
    }

    const int original_line = unit.warnings.front().range.start.line;
    std::string current = original_text;
    int tracked_line = original_line;  // follows the patched region across iterations

    // initial patch
    Patch patch;
    try {
        ModelResponse resp = gateway.sample(build_fix_prompt(ctx, verdict, util));
        patch = parse_diff(resp.samples.at(0), current, tracked_line + 1, unit.file);
        if (patch.strategy == FixStrategy::SafeIntCast) {
            patch = with_include_directive(patch, current, util.header_name);
        }
        current = warnfix::apply(patch, current);
    } catch (const GatewayError& e) {
        return fail_out(unit, std::string("gateway: ") + e.what());
    } catch (const PatchError& e) {
        return fail_out(unit, std::string("initial patch: ") + e.what());
    }
    out.patch_history.push_back(patch);
    if (!patch.hunks.empty()) tracked_line = patch.hunks.front().anchor_line - 1;
    lsp.change_document(unit.file, current);

    int iterations = 0;
    while (iterations < cfg.max_iterations) {
        std::vector<Diagnostic> diags;
        try {
            diags = lsp.fresh_diagnostics(unit.file);
        } catch (const lsp::LspError& e) {
            rollback();
            out.status = RepairStatus::Failure;
            out.iterations_used = iterations;
            out.failure_cause = std::string("lsp: ") + e.what();
            return out;
        }

        std::optional<LineSpan> span = current_span(current, tracked_line);
        if (diagnostics_clean(diags, span, cfg)) {
            if (!cfg.dry_run) write_file_atomic(unit.file, current);
            out.status = RepairStatus::Success;
            out.iterations_used = iterations;
            out.final_strategy = out.patch_history.back().strategy;
            return out;
        }

        std::vector<Diagnostic> relevant = relevant_diagnostics(diags, span, cfg);
        out.residual = relevant;
        std::string snippet = span ? snippet_text_for(current, *span) : current;
        if (!relevant.empty()) tracked_line = relevant.front().range.start.line;

        try {
            ModelRequest req = build_correction_prompt(to_diff_text(out.patch_history.back()),
                                                       relevant, snippet, current,
                                                       verdict.verdict);
            ModelResponse resp = gateway.sample(req);
            Patch fix = parse_diff(resp.samples.at(0), current, tracked_line + 1, unit.file);
            if (fix.strategy == FixStrategy::SafeIntCast) {
                fix = with_include_directive(fix, current, util.header_name);
            }
            current = warnfix::apply(fix, current);
            out.patch_history.push_back(fix);
            if (!fix.hunks.empty()) tracked_line = fix.hunks.front().anchor_line - 1;
        } catch (const GatewayError& e) {
            rollback();
            out.status = RepairStatus::Failure;
            out.iterations_used = iterations;
            out.failure_cause = std::string("gateway: ") + e.what();
            return out;
        } catch (const PatchError& e) {
            rollback();
            out.status = RepairStatus::Failure;
            out.iterations_used = iterations;
            out.failure_cause = std::string("correction patch: ") + e.what();
            return out;
        }
        lsp.change_document(unit.file, current);
        ++iterations;
    }

    rollback();
    out.status = RepairStatus::Failure;
    out.iterations_used = iterations;
    return out;
}

namespace {

// Re-locates the next pending unit inside a file whose earlier units already
// moved lines around. Successful units removed their warnings; failed units
// left theirs in place, so the pending unit is the (failed_so_far)-th data-loss
// group in the refreshed diagnostics.
std::optional<FixUnit> relocate_unit(const FixUnit& original, int failed_before,
                                     lsp::LspFacade& lsp, const RepairConfig& cfg) {
    std::vector<Diagnostic> diags = lsp.fresh_diagnostics(original.file);
    std::vector<Diagnostic> dataloss;
    for (const Diagnostic& d : diags) {
        if (is_dataloss(d, cfg)) dataloss.push_back(d);
    }
    if (dataloss.empty()) return std::nullopt;
    std::map<std::string, std::vector<LineSpan>> spans;
    spans[original.file] = cst::top_level_function_spans(lsp.document_text(original.file));
    std::vector<FixUnit> groups = group_into_units(dataloss, spans);
    if (failed_before >= static_cast<int>(groups.size())) return std::nullopt;
    FixUnit relocated = groups[failed_before];
    relocated.id = original.id;
    return relocated;
}

}  // namespace

std::vector<ValidationOutcome> repair_all(const std::vector<FixUnit>& units, lsp::LspFacade& lsp,
                                          ModelGateway& gateway, const RepairConfig& cfg,
                                          int jobs) {
    // bucket by file, keep (file, line) order
    std::vector<FixUnit> sorted = units;
    std::sort(sorted.begin(), sorted.end(), [](const FixUnit& a, const FixUnit& b) {
        int la = a.warnings.empty() ? 0 : a.warnings.front().range.start.line;
        int lb = b.warnings.empty() ? 0 : b.warnings.front().range.start.line;
        return std::tie(a.file, la) < std::tie(b.file, lb);
    });
    std::vector<std::pair<std::string, std::vector<FixUnit>>> by_file;
    for (FixUnit& u : sorted) {
        if (by_file.empty() || by_file.back().first != u.file) {
            by_file.push_back({u.file, {}});
        }
        by_file.back().second.push_back(std::move(u));
    }

    std::vector<ValidationOutcome> outcomes;
    std::mutex out_mu;

    auto process_file = [&](const std::pair<std::string, std::vector<FixUnit>>& entry) {
        int failed_here = 0;
        for (size_t i = 0; i < entry.second.size(); ++i) {
            const FixUnit& unit = entry.second[i];
            ValidationOutcome outcome;
            if (i == 0) {
                outcome = repair_unit(unit, lsp, gateway, cfg);
            } else {
                std::optional<FixUnit> relocated;
                try {
                    relocated = relocate_unit(unit, failed_here, lsp, cfg);
                } catch (const lsp::LspError& e) {
                    outcome = fail_out(unit, std::string("lsp: ") + e.what());
                    relocated.reset();
                }
                if (relocated) {
                    outcome = repair_unit(*relocated, lsp, gateway, cfg);
                } else if (!outcome.failure_cause) {
                    // an earlier patch already removed this unit's warnings
                    outcome.unit_id = unit.id;
                    outcome.file = unit.file;
                    outcome.warning_count = static_cast<int>(unit.warnings.size());
                    outcome.status = RepairStatus::Success;
                    outcome.note = "resolved by an earlier patch in this file";
                }
            }
            if (outcome.status == RepairStatus::Failure) ++failed_here;
            std::lock_guard<std::mutex> lock(out_mu);
            outcomes.push_back(std::move(outcome));
        }
    };

    if (jobs <= 1 || by_file.size() <= 1) {
        for (const auto& entry : by_file) process_file(entry);
    } else {
        std::vector<std::thread> workers;
        std::atomic<size_t> next{0};
        int n = std::min<int>(jobs, static_cast<int>(by_file.size()));
        for (int w = 0; w < n; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    size_t idx = next.fetch_add(1);
                    if (idx >= by_file.size()) return;
                    process_file(by_file[idx]);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    std::sort(outcomes.begin(), outcomes.end(),
              [](const ValidationOutcome& a, const ValidationOutcome& b) {
                  return std::tie(a.file, a.unit_id) < std::tie(b.file, b.unit_id);
              });
    return outcomes;
}

ordered_json ValidationOutcome::to_json() const {
    ordered_json j;
    j["type"] = "outcome";
    j["unit"] = unit_id;
    j["file"] = file;
    j["status"] = status == RepairStatus::Success ? "success" : "failure";
    j["iterations"] = iterations_used;
    j["warnings"] = warning_count;
    if (final_strategy) {
        j["strategy"] = strategy_name(*final_strategy);
        j["adds_instructions"] = *final_strategy == FixStrategy::SafeIntCast;
    } else {
        j["strategy"] = nullptr;
        j["adds_instructions"] = false;
    }
    if (decision) {
        j["verdict"] = verdict_name(decision->verdict);
        j["ballots"] = {{"needed", decision->counts.needed},
                        {"not_needed", decision->counts.not_needed},
                        {"unparseable", decision->counts.unparseable}};
        j["prompt_hash"] = decision->prompt_hash;
    }
    if (failure_cause) j["failure_cause"] = *failure_cause;
    if (note) j["note"] = *note;
    if (!residual.empty()) {
        j["residual"] = ordered_json::array();
        for (const auto& d : residual) j["residual"].push_back(diagnostic_to_json(d));
    }
    j["patches"] = ordered_json::array();
    for (const auto& p : patch_history) j["patches"].push_back(patch_sidecar_json(p));
    return j;
}

}  // namespace warnfix
