#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace warnfix {

enum class Severity { Error, Warning, Info, Hint };

struct Position {
    int line = 0;       // 0-based
    int character = 0;  // 0-based

    friend bool operator==(const Position&, const Position&) = default;
};

struct Range {
    Position start;
    Position end;

    friend bool operator==(const Range&, const Range&) = default;
};

// One compiler/LSP warning or error.
struct Diagnostic {
    std::string file;
    Range range;
    Severity severity = Severity::Warning;
    std::string code;     // e.g. "-Wimplicit-int-conversion"; empty only for non-compiler sources
    std::string message;
    bool in_macro_expansion = false;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

enum class WarningVariant { ImplicitDataLoss, OutOfScope };

struct WarningClass {
    WarningVariant variant = WarningVariant::OutOfScope;
    std::optional<std::string> subkind;  // e.g. "implicit-int-conversion", or "macro"
};

// Inclusive 0-based line span.
struct LineSpan {
    int start_line = 0;
    int end_line = 0;

    bool contains(int line) const { return line >= start_line && line <= end_line; }
    friend bool operator==(const LineSpan&, const LineSpan&) = default;
};

// The group of data-loss warnings repaired by one patch (one per enclosing function).
struct FixUnit {
    std::string id;
    std::string file;
    std::vector<Diagnostic> warnings;  // nonempty, sorted by position
    std::optional<LineSpan> function_span;
};

const std::set<std::string>& default_dataloss_codes();

// ImplicitDataLoss iff diag.code is in the configured set and the position is not
// inside a macro expansion (macro-expanded diagnostics get subkind "macro").
WarningClass classify(const Diagnostic& diag, const std::set<std::string>& dataloss_codes);

// Groups data-loss diagnostics by enclosing function span; warnings outside any span
// become singleton units with function_span absent. Deterministic and insensitive to
// input order; output sorted by (file, start_line).
std::vector<FixUnit> group_into_units(const std::vector<Diagnostic>& diags,
                                      const std::map<std::string, std::vector<LineSpan>>& spans);

// Parses GCC/Clang stderr lines of the form
//   file:line:col: warning: message [-Wcode]
// Positions are converted to 0-based. A following "note: expanded from macro" line
// marks the preceding diagnostic as macro-expanded.
std::vector<Diagnostic> parse_compiler_output(const std::string& text);

// Converts one textDocument/publishDiagnostics params object.
std::vector<Diagnostic> diagnostics_from_lsp(const std::string& file, const nlohmann::json& params);

nlohmann::ordered_json diagnostic_to_json(const Diagnostic& d);
nlohmann::ordered_json unit_to_json(const FixUnit& u);
std::string units_to_jsonl(const std::vector<FixUnit>& units);

const char* severity_name(Severity s);

}  // namespace warnfix
