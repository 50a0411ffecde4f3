#include "warnfix/patch.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "warnfix/cst.hpp"
#include "warnfix/prompt_format.hpp"
#include "warnfix/util.hpp"

namespace warnfix {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Prompts

namespace {

std::string diff_contract() {
    return "Generate your output in a git-diff-like format: removed lines start with -, added "
           "lines start with +, include at most 2 unchanged context lines per hunk, and output "
           "only the diff.\n";
}

std::string type_block_for_fix(const WarningContext& ctx) {
    std::string out;
    TypeTable table = TypeTable::lp64();
    std::set<std::string> listed;
    for (const auto& info : ctx.identifiers) {
        if (!info.hover.available) continue;
        if (!listed.insert(info.name).second) continue;
        std::string type = extract_type_from_hover(info.hover.summary, info.name);
        if (type.empty()) continue;
        out += info.name + ": " + type;
        if (auto layout = table.lookup(type)) out += " (" + layout_description(*layout) + ")";
        out += "\n";
    }
    return out;
}

std::string warning_line_text(const WarningContext& ctx) {
    const Diagnostic& w = ctx.unit.warnings.front();
    int rel = w.range.start.line - ctx.snippet.span.start_line;
    std::vector<std::string> lines = split_lines(ctx.snippet.text);
    if (rel >= 0 && rel < static_cast<int>(lines.size())) return lines[rel];
    return "";
}

}  // namespace

ModelRequest build_fix_prompt(const WarningContext& ctx, const RangeCheckDecision& verdict,
                              const CastUtilityInfo& util) {
    ModelRequest req;
    req.system = prompt::kSystemPersona;
    req.temperature = 0.0;
    req.sample_count = 1;

    const Diagnostic& w = ctx.unit.warnings.front();
    std::string text;
    text += std::string(prompt::kCode) + "\n" + ctx.snippet.text;
    if (!ctx.snippet.text.empty() && ctx.snippet.text.back() != '\n') text += "\n";
    text += "\n";
    text += std::string(prompt::kTypeInformation) + "\n" + type_block_for_fix(ctx) + "\n";
    text += std::string(prompt::kFixTask) + "\n";
    text += "warning_line: " + std::to_string(w.range.start.line + 1) + "\n";
    text += "warning_text: " + warning_line_text(ctx) + "\n";
    text += "conversion: '" + ctx.source_type + "' to '" + ctx.target_type + "'\n";
    text += std::string("decision: ") +
            (verdict.verdict == Verdict::Needed ? prompt::kMarkerNeeded
                                                : prompt::kMarkerNotNeeded) +
            "\n\n";

    if (verdict.verdict == Verdict::NotNeeded) {
        text += "No range check is needed. Choose the better of two options for this code:\n";
        text += "1. Use static_cast for explicit type conversion.\n";
        text += "2. Modify the type itself, such as using the auto keyword when applicable, "
                "letting type inference remove the implicit conversion.\n\n";
    } else {
        text += "A range check is required. Rewrite the conversion through the checked cast "
                "utility declared in \"" + util.header_name + "\":\n\n";
        text += "template <typename To, typename From>\n";
        text += "To safe_int_cast(From value)\n\n";
        text += "Call it qualified as " + util.qualified_name +
                "<Target>(value); the include directive is added automatically when the file "
                "lacks it.\n\n";
    }
    text += diff_contract();
    req.messages.push_back({ChatMessage::Role::Human, std::move(text)});
    return req;
}

ModelRequest build_correction_prompt(const std::string& previous_diff,
                                     const std::vector<Diagnostic>& diagnostics,
                                     const std::string& current_snippet,
                                     const std::string& file_text, Verdict verdict) {
    ModelRequest req;
    req.system = prompt::kSystemPersona;
    req.temperature = 0.0;
    req.sample_count = 1;

    std::vector<std::string> file_lines = split_lines(file_text);
    std::string text;
    text += "The previously applied patch did not fully resolve the warning.\n\n";
    text += std::string(prompt::kPreviousPatch) + "\n" + previous_diff;
    if (!previous_diff.empty() && previous_diff.back() != '\n') text += "\n";
    text += "\n";
    text += std::string(prompt::kCurrentDiagnostics) + "\n";
    text += std::string("decision: ") +
            (verdict == Verdict::Needed ? prompt::kMarkerNeeded : prompt::kMarkerNotNeeded) + "\n";
    for (const Diagnostic& d : diagnostics) {
        text += "line " + std::to_string(d.range.start.line + 1) + ": " +
                severity_name(d.severity) + ": " + d.message;
        if (!d.code.empty()) text += " [" + d.code + "]";
        text += "\n";
        if (d.range.start.line >= 0 && d.range.start.line < static_cast<int>(file_lines.size())) {
            text += "line_text: " + file_lines[d.range.start.line] + "\n";
        }
    }
    text += "\n";
    text += std::string(prompt::kCode) + "\n" + current_snippet;
    if (!current_snippet.empty() && current_snippet.back() != '\n') text += "\n";
    text += "\n";
    text += "Generate a corrected patch against the current code above.\n";
    text += diff_contract();
    req.messages.push_back({ChatMessage::Role::Human, std::move(text)});
    return req;
}

// ---------------------------------------------------------------------------
// Diff parsing

namespace {

struct RawHunk {
    std::vector<std::string> removed;
    std::vector<std::string> added;
    std::vector<std::string> context_before;
};

std::string strip_prefix(const std::string& line) {
    // one prefix character, then one optional space
    std::string out = line.substr(1);
    if (!out.empty() && out.front() == ' ') out.erase(0, 1);
    return out;
}

// All start indices (0-based) where `block` matches consecutively in `lines`.
std::vector<int> find_block(const std::vector<std::string>& lines,
                            const std::vector<std::string>& block) {
    std::vector<int> hits;
    if (block.empty() || block.size() > lines.size()) return hits;
    for (size_t i = 0; i + block.size() <= lines.size(); ++i) {
        bool ok = true;
        for (size_t k = 0; k < block.size(); ++k) {
            if (lines[i + k] != block[k]) {
                ok = false;
                break;
            }
        }
        if (ok) hits.push_back(static_cast<int>(i));
    }
    return hits;
}

int nearest_hit(const std::vector<int>& hits, int warning_line0, const std::string& what) {
    if (hits.empty()) throw PatchError(PatchErrorKind::NoMatch, "no match in file for " + what);
    int best = hits.front();
    bool tie = false;
    for (size_t i = 1; i < hits.size(); ++i) {
        int d = std::abs(hits[i] - warning_line0);
        int bd = std::abs(best - warning_line0);
        if (d < bd) {
            best = hits[i];
            tie = false;
        } else if (d == bd) {
            tie = true;
        }
    }
    if (tie) {
        throw PatchError(PatchErrorKind::AmbiguousAnchor,
                         "equidistant duplicate anchors for " + what);
    }
    return best;
}

}  // namespace

FixStrategy infer_strategy(const std::vector<Hunk>& hunks) {
    for (const Hunk& h : hunks) {
        for (const std::string& line : h.added) {
            if (line.find("safe_int_cast") != std::string::npos) return FixStrategy::SafeIntCast;
        }
    }

    // declaration whose added form changes the declared type
    auto parse_decl = [](const std::string& line)
        -> std::optional<std::pair<std::string, std::string>> {  // (type prefix, name)
        static const std::set<std::string> type_kw = {
            "auto",   "bool",     "char",  "double",   "float",    "int",
            "long",   "short",    "signed", "unsigned", "const",    "constexpr",
            "static", "volatile", "wchar_t"};
        std::vector<cst::Token> toks = cst::lex(line);
        size_t stop = 0;
        while (stop < toks.size() && !(toks[stop].kind == cst::Token::Kind::Punct &&
                                       (toks[stop].text == "=" || toks[stop].text == ";")))
            ++stop;
        if (stop < 2 || stop == toks.size()) return std::nullopt;
        const cst::Token& name = toks[stop - 1];
        if (name.kind != cst::Token::Kind::Identifier) return std::nullopt;
        std::string type;
        for (size_t i = 0; i + 1 < stop; ++i) {
            const cst::Token& t = toks[i];
            bool ok = (t.kind == cst::Token::Kind::Keyword && type_kw.count(t.text)) ||
                      t.kind == cst::Token::Kind::Identifier ||
                      (t.kind == cst::Token::Kind::Punct &&
                       (t.text == "::" || t.text == "<" || t.text == ">" || t.text == "*" ||
                        t.text == "&"));
            if (!ok) return std::nullopt;
            if (!type.empty()) type += ' ';
            type += t.text;
        }
        if (type.empty()) return std::nullopt;
        return std::make_pair(type, name.text);
    };

    for (const Hunk& h : hunks) {
        for (const std::string& r : h.removed) {
            auto rd = parse_decl(r);
            if (!rd) continue;
            for (const std::string& a : h.added) {
                auto ad = parse_decl(a);
                if (ad && ad->second == rd->second && ad->first != rd->first) {
                    return FixStrategy::TypeChange;
                }
            }
        }
    }
    return FixStrategy::StaticCast;
}

Patch parse_diff(const std::string& answer, const std::string& file_text, int warning_line,
                 const std::string& file) {
    std::vector<std::string> file_lines = split_lines(file_text);
    std::set<std::string> file_line_set(file_lines.begin(), file_lines.end());

    std::vector<RawHunk> raw;
    RawHunk cur;
    std::vector<std::string> recent_context;
    bool in_hunk = false;

    auto finalize = [&] {
        if (in_hunk && (!cur.removed.empty() || !cur.added.empty())) raw.push_back(cur);
        cur = RawHunk{};
        in_hunk = false;
    };

    for (const std::string& line : split_lines(answer)) {
        if (line.rfind("```", 0) == 0 || line.rfind("@@", 0) == 0 ||
            line.rfind("--- ", 0) == 0 || line.rfind("+++ ", 0) == 0 ||
            line.rfind("diff ", 0) == 0) {
            finalize();
            recent_context.clear();
            continue;
        }
        if (!line.empty() && line.front() == '-') {
            if (!in_hunk) {
                cur.context_before = recent_context;
                in_hunk = true;
            }
            cur.removed.push_back(strip_prefix(line));
            continue;
        }
        if (!line.empty() && line.front() == '+') {
            if (!in_hunk) {
                cur.context_before = recent_context;
                in_hunk = true;
            }
            cur.added.push_back(strip_prefix(line));
            continue;
        }
        finalize();
        // a context candidate must actually appear in the file; prose around the
        // diff is ignored
        std::string stripped = line;
        if (!stripped.empty() && stripped.front() == ' ') stripped.erase(0, 1);
        if (file_line_set.count(stripped)) {
            recent_context.push_back(stripped);
            if (recent_context.size() > 2) recent_context.erase(recent_context.begin());
        } else {
            recent_context.clear();
        }
    }
    finalize();

    if (raw.empty()) {
        throw PatchError(PatchErrorKind::MalformedDiff, "answer contains no -/+ prefixed lines");
    }

    const int warning_line0 = warning_line - 1;
    Patch patch;
    patch.file = file;
    patch.base_digest = fnv1a_hex(file_text);

    for (RawHunk& rh : raw) {
        Hunk h;
        h.removed = std::move(rh.removed);
        h.added = std::move(rh.added);
        h.context_before = std::move(rh.context_before);
        if (!h.removed.empty()) {
            std::vector<int> hits = find_block(file_lines, h.removed);
            int at = nearest_hit(hits, warning_line0, "removed line '" + h.removed.front() + "'");
            h.anchor_line = at + 1;
        } else {
            if (h.context_before.empty()) {
                throw PatchError(PatchErrorKind::MalformedDiff,
                                 "insertion hunk has no context line to anchor to");
            }
            std::vector<int> hits = find_block(file_lines, h.context_before);
            int at = nearest_hit(hits, warning_line0,
                                 "context line '" + h.context_before.back() + "'");
            h.anchor_line = at + static_cast<int>(h.context_before.size()) + 1;
        }
        patch.hunks.push_back(std::move(h));
    }

    std::sort(patch.hunks.begin(), patch.hunks.end(),
              [](const Hunk& a, const Hunk& b) { return a.anchor_line < b.anchor_line; });
    for (size_t i = 0; i + 1 < patch.hunks.size(); ++i) {
        int end_excl = patch.hunks[i].anchor_line +
                       static_cast<int>(patch.hunks[i].removed.size());
        if (end_excl > patch.hunks[i + 1].anchor_line) {
            throw PatchError(PatchErrorKind::AmbiguousAnchor, "hunks overlap after anchoring");
        }
    }
    patch.strategy = infer_strategy(patch.hunks);
    return patch;
}

std::string apply(const Patch& patch, const std::string& file_text) {
    if (fnv1a_hex(file_text) != patch.base_digest) {
        throw PatchError(PatchErrorKind::StaleFile,
                         "file content changed since the patch was parsed");
    }
    bool trailing = false;
    std::vector<std::string> lines = split_lines(file_text, &trailing);

    std::vector<const Hunk*> order;
    for (const Hunk& h : patch.hunks) order.push_back(&h);
    std::sort(order.begin(), order.end(),
              [](const Hunk* a, const Hunk* b) { return a->anchor_line > b->anchor_line; });

    for (const Hunk* h : order) {
        int at = h->anchor_line - 1;
        if (at < 0 || at > static_cast<int>(lines.size())) {
            throw PatchError(PatchErrorKind::NoMatch, "anchor outside file");
        }
        if (!h->removed.empty()) {
            if (at + h->removed.size() > lines.size()) {
                throw PatchError(PatchErrorKind::NoMatch, "removed block runs past end of file");
            }
            for (size_t k = 0; k < h->removed.size(); ++k) {
                if (lines[at + k] != h->removed[k]) {
                    throw PatchError(PatchErrorKind::NoMatch,
                                     "removed line mismatch at line " +
                                         std::to_string(at + k + 1));
                }
            }
            lines.erase(lines.begin() + at, lines.begin() + at + h->removed.size());
        }
        lines.insert(lines.begin() + at, h->added.begin(), h->added.end());
    }
    return join_lines(lines, trailing);
}

Patch invert(const Patch& patch, const std::string& pre_text) {
    Patch inv;
    inv.file = patch.file;
    inv.strategy = patch.strategy;
    inv.base_digest = fnv1a_hex(warnfix::apply(patch, pre_text));

    int delta = 0;
    std::vector<const Hunk*> order;
    for (const Hunk& h : patch.hunks) order.push_back(&h);
    std::sort(order.begin(), order.end(),
              [](const Hunk* a, const Hunk* b) { return a->anchor_line < b->anchor_line; });
    for (const Hunk* h : order) {
        Hunk ih;
        ih.anchor_line = h->anchor_line + delta;
        ih.removed = h->added;
        ih.added = h->removed;
        inv.hunks.push_back(std::move(ih));
        delta += static_cast<int>(h->added.size()) - static_cast<int>(h->removed.size());
    }
    return inv;
}

Patch with_include_directive(Patch patch, const std::string& file_text,
                             const std::string& header_name) {
    const std::string include_line = "#include \"" + header_name + "\"";
    for (const std::string& line : split_lines(file_text)) {
        if (trim(line) == include_line) return patch;
    }
    for (const Hunk& h : patch.hunks) {
        for (const std::string& line : h.added) {
            if (trim(line) == include_line) return patch;
        }
    }
    Hunk inc;
    inc.anchor_line = 1;
    inc.added.push_back(include_line);
    patch.hunks.insert(patch.hunks.begin(), std::move(inc));
    return patch;
}

// ---------------------------------------------------------------------------
// Cast utility emission

const std::string& cast_utility_source() {
    static const std::string src = R"hdr(#pragma once

#include <limits>
#include <stdexcept>
#include <type_traits>
#include <utility>

namespace safecast {

// Checked integral conversion: throws when the value is outside the target
// type's representable range. std::cmp_* keep mixed-signedness comparisons
// mathematically exact.
template <typename To, typename From>
To safe_int_cast(From value) {
    static_assert(std::is_integral_v<To> && std::is_integral_v<From> &&
                      !std::is_same_v<To, bool> && !std::is_same_v<From, bool>,
                  "safe_int_cast handles non-bool integral types");
    if (std::cmp_greater(value, std::numeric_limits<To>::max()) ||
        std::cmp_less(value, std::numeric_limits<To>::min())) {
        throw std::runtime_error("safe_int_cast: value out of range for target type");
    }
    return static_cast<To>(value);
}

}  // namespace safecast
)hdr";
    return src;
}

std::string ensure_cast_utility(const std::string& workspace_dir) {
    std::string path = workspace_dir;
    if (!path.empty() && path.back() != '/') path += '/';
    path += "safe_int_cast.hpp";
    if (file_exists(path)) {
        try {
            if (read_file(path) == cast_utility_source()) return path;
        } catch (...) {
        }
    }
    write_file_atomic(path, cast_utility_source());
    return path;
}

OverheadClass classify_overhead(const Patch& patch) {
    return {patch.strategy == FixStrategy::SafeIntCast};
}

std::string to_diff_text(const Patch& patch) {
    std::string out;
    for (const Hunk& h : patch.hunks) {
        for (const std::string& c : h.context_before) out += "  " + c + "\n";
        for (const std::string& r : h.removed) out += "- " + r + "\n";
        for (const std::string& a : h.added) out += "+ " + a + "\n";
    }
    return out;
}

ordered_json patch_sidecar_json(const Patch& patch) {
    ordered_json j;
    j["file"] = patch.file;
    j["strategy"] = strategy_name(patch.strategy);
    j["adds_instructions"] = classify_overhead(patch).adds_instructions;
    j["base_digest"] = patch.base_digest;
    j["hunks"] = ordered_json::array();
    for (const Hunk& h : patch.hunks) {
        j["hunks"].push_back(
            {{"anchor_line", h.anchor_line}, {"removed", h.removed}, {"added", h.added}});
    }
    return j;
}

const char* strategy_name(FixStrategy s) {
    switch (s) {
        case FixStrategy::StaticCast: return "static_cast";
        case FixStrategy::TypeChange: return "type_change";
        case FixStrategy::SafeIntCast: return "safe_int_cast";
    }
    return "static_cast";
}

std::optional<FixStrategy> strategy_from_name(const std::string& name) {
    if (name == "static_cast") return FixStrategy::StaticCast;
    if (name == "type_change") return FixStrategy::TypeChange;
    if (name == "safe_int_cast") return FixStrategy::SafeIntCast;
    return std::nullopt;
}

}  // namespace warnfix
