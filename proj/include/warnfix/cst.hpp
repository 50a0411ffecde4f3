#pragma once

#include <optional>
#include <string>
#include <vector>

#include "warnfix/diagnostics.hpp"

namespace warnfix::cst {

// Pinned grammar revision for audit logs; bump when the recognizer changes shape.
inline constexpr const char* kGrammarVersion = "cxx-lite-1";

struct Token {
    enum class Kind { Identifier, Keyword, Number, String, CharLit, Punct, Preproc };
    Kind kind;
    std::string text;
    int line = 0;  // 0-based
    int col = 0;   // 0-based
};

// Comment- and whitespace-free token stream. Strings/char literals are single
// tokens (raw strings included); a preprocessor directive is one Preproc token.
// Never throws; unterminated constructs are closed at end of input.
std::vector<Token> lex(const std::string& text);

bool is_identifier_token(const Token& t);

struct CallableSpan {
    LineSpan span;                // declaration start line .. closing brace line
    std::string signature;        // single-line, collapsed whitespace; "" for lambdas with no header
    int body_open_line = 0;
    bool is_lambda = false;
};

// Every function/method/lambda definition found by balanced-delimiter matching.
// Tolerates unbalanced trailing input (error nodes are skipped, not fatal).
std::vector<CallableSpan> callable_spans(const std::string& text);

// Innermost callable whose span contains the position, if any.
std::optional<CallableSpan> innermost_enclosing(const std::string& text, int line);

// Top-level (non-nested) callable spans per file, the grouping granularity.
std::vector<LineSpan> top_level_function_spans(const std::string& text);

struct ParseFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace warnfix::cst
