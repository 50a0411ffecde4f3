#include "warnfix/cst.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace warnfix::cst {

namespace {

const std::set<std::string>& keywords() {
    static const std::set<std::string> kw = {
        "alignas", "alignof", "auto", "bool", "break", "case", "catch", "char", "char16_t",
        "char32_t", "char8_t", "class", "concept", "const", "consteval", "constexpr", "constinit",
        "const_cast", "continue", "decltype", "default", "delete", "do", "double", "dynamic_cast",
        "else", "enum", "explicit", "export", "extern", "false", "final", "float", "for", "friend",
        "goto", "if", "inline", "int", "long", "mutable", "namespace", "new", "noexcept",
        "nullptr", "operator", "override", "private", "protected", "public", "register",
        "reinterpret_cast", "requires", "return", "short", "signed", "sizeof", "static",
        "static_assert", "static_cast", "struct", "switch", "template", "this", "thread_local",
        "throw", "true", "try", "typedef", "typeid", "typename", "union", "unsigned", "using",
        "virtual", "void", "volatile", "wchar_t", "while"};
    return kw;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

bool is_identifier_token(const Token& t) { return t.kind == Token::Kind::Identifier; }

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    int line = 0, col = 0;
    size_t i = 0;
    const size_t n = text.size();

    auto advance = [&](size_t count) {
        for (size_t k = 0; k < count && i < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 0;
            } else {
                ++col;
            }
        }
    };

    while (i < n) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        int tl = line, tc = col;
        // comments
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            while (i < n && text[i] != '\n') advance(1);
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '*') {
            advance(2);
            while (i < n && !(text[i] == '*' && i + 1 < n && text[i + 1] == '/')) advance(1);
            advance(2);
            continue;
        }
        // preprocessor line (line continuations honored)
        if (c == '#' && (out.empty() || tc == 0 ||
                         text.rfind('\n', i ? i - 1 : 0) != std::string::npos)) {
            size_t start = i;
            while (i < n) {
                if (text[i] == '\n' && (i == 0 || text[i - 1] != '\\')) break;
                advance(1);
            }
            out.push_back({Token::Kind::Preproc, text.substr(start, i - start), tl, tc});
            continue;
        }
        // raw string
        if (c == 'R' && i + 1 < n && text[i + 1] == '"') {
            size_t start = i;
            size_t delim_end = text.find('(', i + 2);
            if (delim_end != std::string::npos) {
                std::string delim = text.substr(i + 2, delim_end - (i + 2));
                std::string closer = ")" + delim + "\"";
                size_t close = text.find(closer, delim_end);
                size_t end = close == std::string::npos ? n : close + closer.size();
                size_t len = end - start;
                out.push_back({Token::Kind::String, text.substr(start, len), tl, tc});
                advance(len);
                continue;
            }
        }
        if (c == '"' || c == '\'') {
            size_t start = i;
            char quote = c;
            advance(1);
            while (i < n && text[i] != quote) {
                if (text[i] == '\\' && i + 1 < n) advance(1);
                if (text[i] == '\n') break;  // unterminated; stop at line end
                advance(1);
            }
            if (i < n && text[i] == quote) advance(1);
            out.push_back({quote == '"' ? Token::Kind::String : Token::Kind::CharLit,
                           text.substr(start, i - start), tl, tc});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            size_t start = i;
            while (i < n && (ident_char(text[i]) || text[i] == '.' || text[i] == '\'' ||
                             ((text[i] == '+' || text[i] == '-') && i > start &&
                              (text[i - 1] == 'e' || text[i - 1] == 'E' || text[i - 1] == 'p' ||
                               text[i - 1] == 'P')))) {
                advance(1);
            }
            out.push_back({Token::Kind::Number, text.substr(start, i - start), tl, tc});
            continue;
        }
        if (ident_start(c)) {
            size_t start = i;
            while (i < n && ident_char(text[i])) advance(1);
            std::string word = text.substr(start, i - start);
            Token::Kind kind =
                keywords().count(word) ? Token::Kind::Keyword : Token::Kind::Identifier;
            out.push_back({kind, std::move(word), tl, tc});
            continue;
        }
        // multi-char punctuation we care about keeping whole
        static const char* two_char[] = {"::", "->", "<<", ">>", "<=", ">=", "==", "!=", "&&",
                                         "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
                                         "++", "--"};
        std::string punct(1, c);
        for (const char* p : two_char) {
            if (i + 1 < n && text[i] == p[0] && text[i + 1] == p[1]) {
                punct = p;
                break;
            }
        }
        advance(punct.size());
        out.push_back({Token::Kind::Punct, punct, tl, tc});
    }
    return out;
}

namespace {

// Walks back from tokens[open_brace] to decide whether this '{' opens a callable
// body, and if so where the declaration starts.
struct CallableHeader {
    bool is_callable = false;
    bool is_lambda = false;
    size_t decl_start = 0;  // token index of the first declaration token
};

bool is_cv_tail(const Token& t) {
    if (t.kind == Token::Kind::Keyword) {
        return t.text == "const" || t.text == "noexcept" || t.text == "override" ||
               t.text == "mutable" || t.text == "final" || t.text == "volatile" ||
               t.text == "try" || t.text == "requires";
    }
    if (t.kind == Token::Kind::Identifier) return t.text == "override" || t.text == "final";
    return false;
}

// Finds the matching opener index for a closer at `pos`, scanning left.
std::optional<size_t> match_back(const std::vector<Token>& toks, size_t pos, const char* open,
                                 const char* close) {
    int depth = 0;
    for (size_t k = pos + 1; k-- > 0;) {
        if (toks[k].kind != Token::Kind::Punct) continue;
        if (toks[k].text == close) ++depth;
        else if (toks[k].text == open) {
            --depth;
            if (depth == 0) return k;
        }
    }
    return std::nullopt;
}

CallableHeader classify_brace(const std::vector<Token>& toks, size_t brace) {
    CallableHeader h;
    if (brace == 0) return h;
    size_t k = brace;  // will look at tokens before `brace`

    // skip trailing qualifiers and a trailing-return-type "-> T" chain
    while (k > 0) {
        const Token& t = toks[k - 1];
        if (is_cv_tail(t)) {
            --k;
            continue;
        }
        if (t.kind == Token::Kind::Punct && t.text == ")") break;
        if (t.kind == Token::Kind::Punct && t.text == "]") break;  // lambda w/o params
        // trailing return type tokens: identifiers/keywords/:: / <...> between ')' and '{'
        if (t.kind == Token::Kind::Identifier || t.kind == Token::Kind::Keyword ||
            (t.kind == Token::Kind::Punct &&
             (t.text == "::" || t.text == "<" || t.text == ">" || t.text == "*" ||
              t.text == "&" || t.text == "->" || t.text == ","))) {
            --k;
            continue;
        }
        return h;
    }
    if (k == 0) return h;

    const Token& closer = toks[k - 1];
    if (closer.kind != Token::Kind::Punct) return h;

    if (closer.text == "]") {
        auto open = match_back(toks, k - 1, "[", "]");
        if (!open) return h;
        h.is_callable = true;
        h.is_lambda = true;
        h.decl_start = *open;
        return h;
    }
    if (closer.text != ")") return h;

    auto open_paren = match_back(toks, k - 1, "(", ")");
    if (!open_paren) return h;
    size_t p = *open_paren;

    // constructor initializer lists:  Foo(...) : a(1), b{2} {   — hop back over
    // ", name(...)" groups until the ':' then expect the real parameter list.
    while (p > 0) {
        size_t name_idx = p;  // token before '('
        if (name_idx == 0) break;
        const Token& before = toks[name_idx - 1];
        if (before.kind == Token::Kind::Identifier && name_idx >= 2 &&
            toks[name_idx - 2].kind == Token::Kind::Punct &&
            (toks[name_idx - 2].text == ":" || toks[name_idx - 2].text == ",") &&
            // ignore "::" scope punctuation
            toks[name_idx - 2].text != "::") {
            // walk left past this init item to the previous ')' or '}' group
            size_t q = name_idx - 2;
            if (toks[q].text == ":") {
                // before ':' must be the param list closer
                if (q == 0 || toks[q - 1].kind != Token::Kind::Punct || toks[q - 1].text != ")")
                    return h;
                auto real_open = match_back(toks, q - 1, "(", ")");
                if (!real_open) return h;
                p = *real_open;
                break;
            }
            // ',' — keep scanning left for previous init item's '(' .. ')'
            if (q == 0 || toks[q - 1].kind != Token::Kind::Punct ||
                (toks[q - 1].text != ")" && toks[q - 1].text != "}"))
                return h;
            const char* oc = toks[q - 1].text == ")" ? "(" : "{";
            const char* cc = toks[q - 1].text == ")" ? ")" : "}";
            auto prev_open = match_back(toks, q - 1, oc, cc);
            if (!prev_open) return h;
            p = *prev_open;
            continue;
        }
        break;
    }

    if (p == 0) return h;
    const Token& name = toks[p - 1];
    if (name.kind == Token::Kind::Keyword) {
        // control flow or declarations that own '(...)' but no callable body
        static const std::set<std::string> banned = {"if", "for",    "while", "switch",
                                                     "catch", "return", "sizeof", "alignof"};
        if (banned.count(name.text)) return h;
        if (name.text != "operator") return h;  // e.g. "decltype(...)"
    }
    if (name.kind == Token::Kind::Punct) {
        // "operator()" / "operator[]" / conversion operators collapse here; see below
        if (name.text != ">" && name.text != "]" && name.text != ")") return h;
    }

    // declaration start: walk left until a statement boundary
    size_t s = p - 1;
    int angle = 0;
    while (s > 0) {
        const Token& t = toks[s - 1];
        if (t.kind == Token::Kind::Punct) {
            if (t.text == ">") ++angle;
            else if (t.text == "<") { if (angle == 0) break; --angle; }
            else if (t.text == ";" || t.text == "{" || t.text == "}") break;
            else if (t.text == ":" && s >= 2 &&
                     (toks[s - 2].text == "public" || toks[s - 2].text == "private" ||
                      toks[s - 2].text == "protected"))
                break;
            else if (t.text == "(" || t.text == ",") break;  // inside an argument list: not a def
        }
        if (t.kind == Token::Kind::Preproc) break;
        if (t.kind == Token::Kind::Keyword &&
            (t.text == "return" || t.text == "else" || t.text == "do" || t.text == "case"))
            break;
        --s;
    }
    // Reject bodies introduced inside an expression (e.g. a call argument)
    h.is_callable = true;
    h.decl_start = s;
    return h;
}

std::string render_signature(const std::vector<Token>& toks, size_t from, size_t to_excl) {
    std::string sig;
    for (size_t k = from; k < to_excl; ++k) {
        const Token& t = toks[k];
        if (t.kind == Token::Kind::Preproc) continue;
        if (!sig.empty()) {
            const std::string& prev = toks[k - 1].text;
            bool no_space_before = t.kind == Token::Kind::Punct &&
                                   (t.text == "(" || t.text == ")" || t.text == "," ||
                                    t.text == "::" || t.text == "<" || t.text == ">" ||
                                    t.text == "[" || t.text == "]" || t.text == ";");
            bool no_space_after_prev = prev == "(" || prev == "::" || prev == "<" || prev == "[" ||
                                       prev == "~" || prev == "*" || prev == "&";
            if (!no_space_before && !no_space_after_prev) sig += ' ';
            if (t.text == "(" && toks[k - 1].kind != Token::Kind::Identifier &&
                toks[k - 1].kind != Token::Kind::Keyword && prev != ">" && prev != "]") {
                // keep space before '(' only after operators; collapse otherwise
            }
        }
        sig += t.text;
    }
    return sig;
}

}  // namespace

std::vector<CallableSpan> callable_spans(const std::string& text) {
    std::vector<Token> toks = lex(text);
    std::vector<CallableSpan> out;

    // brace matching over the token stream
    std::vector<size_t> stack;
    std::vector<std::pair<size_t, size_t>> brace_pairs;  // (open idx, close idx)
    for (size_t k = 0; k < toks.size(); ++k) {
        if (toks[k].kind != Token::Kind::Punct) continue;
        if (toks[k].text == "{") stack.push_back(k);
        else if (toks[k].text == "}" && !stack.empty()) {
            brace_pairs.emplace_back(stack.back(), k);
            stack.pop_back();
        }
    }

    for (auto [open, close] : brace_pairs) {
        CallableHeader h = classify_brace(toks, open);
        if (!h.is_callable) continue;
        CallableSpan cs;
        cs.span.start_line = toks[h.decl_start].line;
        cs.span.end_line = toks[close].line;
        cs.body_open_line = toks[open].line;
        cs.is_lambda = h.is_lambda;
        cs.signature = render_signature(toks, h.decl_start, open);
        out.push_back(std::move(cs));
    }
    std::sort(out.begin(), out.end(), [](const CallableSpan& a, const CallableSpan& b) {
        return std::tie(a.span.start_line, b.span.end_line) <
               std::tie(b.span.start_line, a.span.end_line);
    });
    return out;
}

std::optional<CallableSpan> innermost_enclosing(const std::string& text, int line) {
    std::optional<CallableSpan> best;
    for (const CallableSpan& cs : callable_spans(text)) {
        if (!cs.span.contains(line)) continue;
        if (!best || cs.span.start_line >= best->span.start_line) best = cs;
    }
    return best;
}

std::vector<LineSpan> top_level_function_spans(const std::string& text) {
    std::vector<CallableSpan> all = callable_spans(text);
    std::vector<LineSpan> out;
    for (const CallableSpan& cs : all) {
        bool nested = false;
        for (const CallableSpan& other : all) {
            if (&other == &cs) continue;
            if (other.span.start_line <= cs.span.start_line &&
                other.span.end_line >= cs.span.end_line &&
                (other.span.start_line < cs.span.start_line ||
                 other.span.end_line > cs.span.end_line)) {
                nested = true;
                break;
            }
        }
        if (!nested) out.push_back(cs.span);
    }
    std::sort(out.begin(), out.end(),
              [](const LineSpan& a, const LineSpan& b) { return a.start_line < b.start_line; });
    return out;
}

}  // namespace warnfix::cst
