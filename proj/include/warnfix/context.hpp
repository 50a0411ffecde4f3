#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "warnfix/diagnostics.hpp"
#include "warnfix/gateway.hpp"
#include "warnfix/lsp_client.hpp"

namespace warnfix {

// ±lines around a warning when no enclosing callable resolves.
inline constexpr int kFallbackWindow = 15;

struct FunctionSnippet {
    std::string file;
    LineSpan span;          // 0-based, inclusive
    std::string text;       // byte-for-byte file content of span
    std::string signature;  // "" when fallback_window
    bool fallback_window = false;
};

struct IdentifierInfo {
    std::string name;
    Position position;
    lsp::HoverResult hover;
    std::optional<std::string> definition_snippet;
};

struct ReturnRangeAnalysis {
    std::string function_signature;
    std::string range_description;
    std::optional<Bounds> bounds;
    bool available = true;
};

struct WarningContext {
    FixUnit unit;
    FunctionSnippet snippet;
    std::vector<IdentifierInfo> identifiers;
    std::vector<ReturnRangeAnalysis> return_ranges;
    std::string source_type;
    std::string target_type;
    bool partial = false;

    nlohmann::ordered_json to_json() const;
};

struct EmptyContext : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Innermost function-definition (or lambda) snippet containing the position;
// falls back to a ±kFallbackWindow window with an empty signature.
FunctionSnippet enclosing_function(const std::string& file_text, Position warning_pos,
                                   const std::string& file = "");

// Identifier tokens on the warning line plus, for each, its earliest prior
// occurrence inside the snippet. Deduplicated by (name, position).
std::vector<std::pair<std::string, Position>> collect_identifiers(const FunctionSnippet& snippet,
                                                                  Position warning_pos);

// One model request with the fixed summarization template; numeric bounds of the
// form "between A and B" / "A to B" / "in [A, B]" are parsed out of the answer.
ReturnRangeAnalysis summarize_return_range(const std::string& signature, const std::string& body,
                                           ModelGateway& gateway);

ModelRequest build_summarize_prompt(const std::string& signature, const std::string& body);

std::optional<Bounds> parse_bounds_phrase(const std::string& text);

// "implicit conversion ... 'src' to 'dst'" out of a diagnostic message.
std::optional<std::pair<std::string, std::string>> conversion_from_message(
    const std::string& message);

// Best-effort type extraction from a hover summary ("long long bigNumber",
// clangd's "Type: `long long`" markdown, etc.).
std::string extract_type_from_hover(const std::string& summary, const std::string& name);

WarningContext assemble(const FixUnit& unit, lsp::LspFacade& lsp, ModelGateway& gateway);

}  // namespace warnfix
