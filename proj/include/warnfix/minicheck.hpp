#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "warnfix/diagnostics.hpp"
#include "warnfix/gateway.hpp"
#include "warnfix/lsp_client.hpp"

namespace warnfix::minicheck {

// Single-file narrowing-conversion analyzer behind the bundled language server
// (warnfix-minilsp). Covers the declaration/assignment/return shapes of the
// fixture corpus: declared variables, same-file function calls, integer
// literals, arithmetic with usual promotions, static_cast / safe_int_cast
// silencing. Not a general C++ front end.

struct SymbolInfo {
    enum class Kind { Variable, Function };
    Kind kind;
    std::string name;
    std::string type;       // declared type (variables) or return type (functions)
    std::string signature;  // functions only
    Position position;      // name token
};

struct FileAnalysis {
    std::vector<Diagnostic> diagnostics;            // sorted by position
    std::vector<SymbolInfo> symbols;
};

FileAnalysis analyze(const std::string& file, const std::string& text,
                     const TypeTable& table = TypeTable::lp64());

std::optional<SymbolInfo> symbol_at(const std::string& text, Position pos,
                                    const TypeTable& table = TypeTable::lp64());

lsp::HoverResult hover_at(const std::string& text, Position pos,
                          const TypeTable& table = TypeTable::lp64());

std::optional<lsp::DefinitionLocation> definition_at(const std::string& file,
                                                     const std::string& text, Position pos,
                                                     const TypeTable& table = TypeTable::lp64());

}  // namespace warnfix::minicheck
