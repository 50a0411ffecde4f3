#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "warnfix/context.hpp"
#include "warnfix/decide.hpp"

namespace warnfix {

// One contiguous block of removed/added lines. anchor_line is 1-based in the
// pre-patch file; a hunk with no removed lines inserts before anchor_line.
struct Hunk {
    int anchor_line = 0;
    std::vector<std::string> removed;
    std::vector<std::string> added;
    std::vector<std::string> context_before;  // up to 2 lines
};

enum class FixStrategy { StaticCast, TypeChange, SafeIntCast };

struct Patch {
    std::string file;
    std::vector<Hunk> hunks;  // non-overlapping, sorted by anchor_line
    FixStrategy strategy = FixStrategy::StaticCast;
    std::string base_digest;  // fnv1a of the text the anchors were resolved against
};

struct OverheadClass {
    bool adds_instructions = false;
};

enum class PatchErrorKind { NoMatch, AmbiguousAnchor, MalformedDiff, StaleFile };

struct PatchError : std::runtime_error {
    PatchErrorKind kind;
    PatchError(PatchErrorKind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

struct CastUtilityInfo {
    std::string header_name = "safe_int_cast.hpp";
    std::string qualified_name = "safecast::safe_int_cast";
};

// Fix prompt: cast-vs-type-change options when no check is needed, the checked
// cast utility when one is; diff-format output contract either way.
ModelRequest build_fix_prompt(const WarningContext& ctx, const RangeCheckDecision& verdict,
                              const CastUtilityInfo& util = {});

// Correction prompt for Algorithm-1 iterations: latest patch + current diagnostics
// + the current code region.
ModelRequest build_correction_prompt(const std::string& previous_diff,
                                     const std::vector<Diagnostic>& diagnostics,
                                     const std::string& current_snippet,
                                     const std::string& file_text, Verdict verdict);

// Parses a git-diff-like answer against file_text. Removed lines are matched
// verbatim; duplicate matches resolve to the occurrence nearest warning_line
// (1-based); equidistant duplicates raise AmbiguousAnchor.
Patch parse_diff(const std::string& answer, const std::string& file_text, int warning_line,
                 const std::string& file = "");

// Pure: applies hunks bottom-up, leaving the input untouched. StaleFile when
// file_text no longer matches the parse-time digest.
std::string apply(const Patch& patch, const std::string& file_text);

// Inverse patch (swapped removed/added) with anchors in post-patch coordinates;
// applying it to apply(patch, pre_text) restores pre_text.
Patch invert(const Patch& patch, const std::string& pre_text);

// Adds an include hunk for the checked-cast header when file_text lacks one.
Patch with_include_directive(Patch patch, const std::string& file_text,
                             const std::string& header_name = "safe_int_cast.hpp");

// Idempotently writes the checked-cast header into the workspace; returns its path.
std::string ensure_cast_utility(const std::string& workspace_dir);

const std::string& cast_utility_source();

OverheadClass classify_overhead(const Patch& patch);

FixStrategy infer_strategy(const std::vector<Hunk>& hunks);

std::string to_diff_text(const Patch& patch);
nlohmann::ordered_json patch_sidecar_json(const Patch& patch);

const char* strategy_name(FixStrategy s);
std::optional<FixStrategy> strategy_from_name(const std::string& name);

}  // namespace warnfix
