#include "warnfix/minicheck.hpp"

#include <algorithm>
#include <set>

#include "warnfix/cst.hpp"
#include "warnfix/util.hpp"

namespace warnfix::minicheck {

namespace {

using cst::Token;

const std::set<std::string>& type_keywords() {
    static const std::set<std::string> kw = {"auto", "bool",  "char",     "double", "float",
                                             "int",  "long",  "short",    "signed", "unsigned",
                                             "void", "const", "constexpr"};
    return kw;
}

bool is_known_typedef(const std::string& name) {
    static const std::set<std::string> names = {
        "int8_t",  "int16_t",  "int32_t",  "int64_t", "uint8_t", "uint16_t",
        "uint32_t", "uint64_t", "size_t",  "ptrdiff_t"};
    return names.count(name) > 0;
}

struct VarDecl {
    std::string type;
    Position pos;  // name token
};

struct FuncDecl {
    std::string return_type;
    std::string signature;
    Position pos;  // name token
    LineSpan span;
};

struct Scope {
    std::map<std::string, VarDecl> globals;
    std::map<std::string, FuncDecl> functions;
    // per function-span locals (params + declared-so-far)
    std::map<int, std::map<std::string, VarDecl>> locals_by_span_start;
    bool has_cast_header = false;
};

// Splits a signature like "int getSomeValue(unsigned short x)" into the return
// type, name, and parameter declarations.
struct SignatureParts {
    std::string return_type;
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;  // (type, name)
};

std::optional<SignatureParts> parse_signature(const std::string& signature) {
    std::vector<Token> toks = cst::lex(signature);
    size_t open = toks.size();
    for (size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind == Token::Kind::Punct && toks[i].text == "(") {
            open = i;
            break;
        }
    }
    if (open == toks.size() || open == 0) return std::nullopt;
    if (toks[open - 1].kind != Token::Kind::Identifier) return std::nullopt;

    SignatureParts out;
    out.name = toks[open - 1].text;
    for (size_t i = 0; i + 1 < open; ++i) {
        const Token& t = toks[i];
        if (t.text == "static" || t.text == "inline" || t.text == "constexpr") continue;
        if (!out.return_type.empty()) out.return_type += ' ';
        out.return_type += t.text;
    }
    if (out.return_type.empty()) return std::nullopt;

    int depth = 0;
    std::vector<Token> param;
    auto flush = [&out, &param] {
        if (param.size() >= 2 && param.back().kind == Token::Kind::Identifier) {
            std::string type;
            for (size_t k = 0; k + 1 < param.size(); ++k) {
                if (!type.empty()) type += ' ';
                type += param[k].text;
            }
            out.params.emplace_back(type, param.back().text);
        }
        param.clear();
    };
    for (size_t i = open; i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (t.kind == Token::Kind::Punct && t.text == "(") {
            if (depth++ == 0) continue;
        }
        if (t.kind == Token::Kind::Punct && t.text == ")") {
            if (--depth == 0) {
                flush();
                break;
            }
        }
        if (depth >= 1) {
            if (t.kind == Token::Kind::Punct && t.text == "," && depth == 1) {
                flush();
                continue;
            }
            param.push_back(t);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Expression typing

struct TypeResult {
    std::string name;   // canonical type name; "" when unknown
    bool is_error = false;
    std::optional<long long> const_value;  // set for plain literal expressions
};

struct Analyzer {
    const std::string& file;
    const TypeTable& table;
    Scope scope;
    std::vector<Diagnostic> diags;

    IntLayout promoted(IntLayout l) const {
        if (l.bits < 32) return {32, true};  // integer promotion
        return l;
    }

    std::string layout_name(IntLayout l) const {
        if (l.is_signed) {
            switch (l.bits) {
                case 8: return "signed char";
                case 16: return "short";
                case 32: return "int";
                default: return "long long";
            }
        }
        switch (l.bits) {
            case 8: return "unsigned char";
            case 16: return "unsigned short";
            case 32: return "unsigned int";
            default: return "unsigned long long";
        }
    }

    std::optional<VarDecl> lookup_var(const std::string& name, int span_start, int line) const {
        auto sit = scope.locals_by_span_start.find(span_start);
        if (sit != scope.locals_by_span_start.end()) {
            auto vit = sit->second.find(name);
            if (vit != sit->second.end() && vit->second.pos.line <= line) return vit->second;
        }
        auto git = scope.globals.find(name);
        if (git != scope.globals.end()) return git->second;
        return std::nullopt;
    }

    void error_undeclared(const Token& t, int line_offset) {
        Diagnostic d;
        d.file = file;
        d.range.start = {t.line + line_offset, t.col};
        d.range.end = {t.line + line_offset, t.col + static_cast<int>(t.text.size())};
        d.severity = Severity::Error;
        d.code = "undeclared_var_use";
        d.message = "use of undeclared identifier '" + t.text + "'";
        diags.push_back(std::move(d));
    }

    // Type of the token range [begin, end) on one logical statement line.
    // line_offset converts token lines to absolute file lines.
    TypeResult type_of(const std::vector<Token>& toks, size_t begin, size_t end, int span_start,
                       int abs_line, int line_offset) {
        // strip outer parens
        while (end > begin + 1 && toks[begin].kind == Token::Kind::Punct &&
               toks[begin].text == "(" && matching_paren(toks, begin, end) == end - 1) {
            ++begin;
            --end;
        }
        if (begin >= end) return {"", false, std::nullopt};

        // lowest-precedence split first: scan for +,-,*,/,%,&,|,^,<<,>> at depth 0
        static const std::set<std::string> binops = {"+", "-", "*", "/", "%", "&",
                                                     "|", "^", "<<", ">>"};
        int depth = 0;
        int angle = 0;
        for (size_t i = end; i-- > begin + 1;) {
            const Token& t = toks[i];
            if (t.kind != Token::Kind::Punct) continue;
            if (t.text == ")") ++depth;
            else if (t.text == "(") --depth;
            else if (t.text == ">") ++angle;
            else if (t.text == "<") --angle;
            else if (depth == 0 && angle == 0 && binops.count(t.text)) {
                const Token& prev = toks[i - 1];
                bool unary = prev.kind == Token::Kind::Punct && prev.text != ")" &&
                             prev.text != "]";
                if (unary) continue;
                TypeResult lhs = type_of(toks, begin, i, span_start, abs_line, line_offset);
                TypeResult rhs = type_of(toks, i + 1, end, span_start, abs_line, line_offset);
                if (lhs.is_error || rhs.is_error) return {"", true, std::nullopt};
                auto ll = table.lookup(lhs.name);
                auto rl = table.lookup(rhs.name);
                if (!ll || !rl) return {"", false, std::nullopt};
                IntLayout a = promoted(*ll), b = promoted(*rl);
                IntLayout r;
                if (a.bits == b.bits) r = {a.bits, a.is_signed && b.is_signed};
                else r = a.bits > b.bits ? a : b;
                return {layout_name(r), false, std::nullopt};
            }
        }

        const Token& t0 = toks[begin];
        // unary +/- propagate the operand type (and fold literal values)
        if (t0.kind == Token::Kind::Punct && (t0.text == "-" || t0.text == "+")) {
            TypeResult inner = type_of(toks, begin + 1, end, span_start, abs_line, line_offset);
            if (inner.const_value && t0.text == "-") inner.const_value = -*inner.const_value;
            if (!inner.name.empty()) {
                auto l = table.lookup(inner.name);
                if (l) inner.name = layout_name(promoted(*l));
            }
            return inner;
        }
        // static_cast<T>(...) / safe_int_cast<T>(...)
        if ((t0.kind == Token::Kind::Keyword && t0.text == "static_cast") ||
            (t0.kind == Token::Kind::Identifier && t0.text == "safe_int_cast")) {
            if (t0.text == "safe_int_cast" && !scope.has_cast_header) {
                error_undeclared(t0, line_offset);
                return {"", true, std::nullopt};
            }
            std::string targ;
            size_t i = begin + 1;
            if (i < end && toks[i].text == "<") {
                for (++i; i < end && toks[i].text != ">"; ++i) {
                    if (!targ.empty()) targ += ' ';
                    targ += toks[i].text;
                }
            }
            return {TypeTable::normalize(targ), false, std::nullopt};
        }
        // qualified safecast::safe_int_cast<T>(...)
        if (t0.kind == Token::Kind::Identifier && begin + 2 < end &&
            toks[begin + 1].kind == Token::Kind::Punct && toks[begin + 1].text == "::") {
            return type_of(toks, begin + 2, end, span_start, abs_line, line_offset);
        }
        if (t0.kind == Token::Kind::Number) {
            std::string suffix;
            for (char c : t0.text) {
                if (c == 'l' || c == 'L' || c == 'u' || c == 'U') suffix.push_back(
                    static_cast<char>(std::tolower(c)));
            }
            bool uns = suffix.find('u') != std::string::npos;
            int ells = static_cast<int>(std::count(suffix.begin(), suffix.end(), 'l'));
            if (ells >= 2) return {uns ? "unsigned long long" : "long long", false, std::nullopt};
            if (ells == 1) return {uns ? "unsigned long" : "long", false, std::nullopt};
            // magnitude pushes plain literals up
            errno = 0;
            unsigned long long v = std::strtoull(t0.text.c_str(), nullptr, 0);
            std::optional<long long> cv;
            if (begin + 1 == end && v <= 0x7fffffffffffffffULL) {
                cv = static_cast<long long>(v);
            }
            if (v > 0x7fffffffULL) return {uns ? "unsigned long long" : "long long", false, cv};
            return {uns ? "unsigned int" : "int", false, cv};
        }
        if (t0.kind == Token::Kind::Identifier) {
            // call?
            if (begin + 1 < end && toks[begin + 1].kind == Token::Kind::Punct &&
                toks[begin + 1].text == "(") {
                auto fit = scope.functions.find(t0.text);
                if (fit == scope.functions.end()) {
                    error_undeclared(t0, line_offset);
                    return {"", true, std::nullopt};
                }
                return {TypeTable::normalize(fit->second.return_type), false, std::nullopt};
            }
            auto var = lookup_var(t0.text, span_start, abs_line);
            if (!var) {
                error_undeclared(t0, line_offset);
                return {"", true, std::nullopt};
            }
            if (begin + 1 != end) return {"", false, std::nullopt};  // indexing, members: unknown
            return {TypeTable::normalize(var->type), false, std::nullopt};
        }
        return {"", false, std::nullopt};
    }

    static size_t matching_paren(const std::vector<Token>& toks, size_t open, size_t end) {
        int depth = 0;
        for (size_t i = open; i < end; ++i) {
            if (toks[i].kind != Token::Kind::Punct) continue;
            if (toks[i].text == "(") ++depth;
            else if (toks[i].text == ")" && --depth == 0) return i;
        }
        return end;
    }

    void check_narrowing(const std::string& src_type, const std::string& dst_type,
                         const Token& expr_first, const Token& expr_last, int line_offset,
                         std::optional<long long> const_value = std::nullopt) {
        auto src = table.lookup(src_type);
        auto dst = table.lookup(dst_type);
        if (!src || !dst) return;
        if (const_value) {
            // a constant that fits the target is not a data-loss conversion
            __int128 v = *const_value;
            if (v >= TypeTable::min_of(*dst) && v <= TypeTable::max_of(*dst)) return;
        }
        bool fits = TypeTable::min_of(*src) >= TypeTable::min_of(*dst) &&
                    TypeTable::max_of(*src) <= TypeTable::max_of(*dst);
        if (fits) return;
        Diagnostic d;
        d.file = file;
        d.range.start = {expr_first.line + line_offset, expr_first.col};
        d.range.end = {expr_last.line + line_offset,
                       expr_last.col + static_cast<int>(expr_last.text.size())};
        d.severity = Severity::Warning;
        // clang splits this warning family by width pair
        d.code = (src->bits == 64 && dst->bits == 32) ? "-Wshorten-64-to-32"
                                                      : "-Wimplicit-int-conversion";
        d.message = "implicit conversion loses integer precision: '" +
                    TypeTable::normalize(src_type) + "' to '" + TypeTable::normalize(dst_type) +
                    "'";
        diags.push_back(std::move(d));
    }
};

// Tries to read a variable declaration out of one statement's tokens:
//   <type tokens> <name> [= <expr>] ;
std::optional<std::pair<std::string, size_t>> parse_decl_prefix(const std::vector<Token>& toks) {
    size_t i = 0;
    std::string type;
    while (i < toks.size()) {
        const Token& t = toks[i];
        bool type_word = (t.kind == Token::Kind::Keyword && type_keywords().count(t.text)) ||
                         (t.kind == Token::Kind::Identifier && is_known_typedef(t.text));
        if (!type_word) break;
        if (t.text != "const" && t.text != "constexpr") {
            if (!type.empty()) type += ' ';
            type += t.text;
        }
        ++i;
    }
    if (type.empty() || i >= toks.size()) return std::nullopt;
    if (toks[i].kind != Token::Kind::Identifier) return std::nullopt;
    // function definition/uses: name '(' is not a variable decl
    if (i + 1 < toks.size() && toks[i + 1].kind == Token::Kind::Punct &&
        toks[i + 1].text == "(")
        return std::nullopt;
    return std::make_pair(type, i);
}

}  // namespace

FileAnalysis analyze(const std::string& file, const std::string& text, const TypeTable& table) {
    Analyzer an{file, table, {}, {}};

    std::vector<Token> all = cst::lex(text);
    for (const Token& t : all) {
        if (t.kind == Token::Kind::Preproc &&
            t.text.find("safe_int_cast.hpp") != std::string::npos) {
            an.scope.has_cast_header = true;
        }
    }

    std::vector<cst::CallableSpan> callables = cst::callable_spans(text);
    for (const auto& c : callables) {
        auto parts = parse_signature(c.signature);
        if (!parts) continue;
        FuncDecl f;
        f.return_type = parts->return_type;
        f.signature = c.signature;
        f.span = c.span;
        f.pos = {c.span.start_line, 0};
        an.scope.functions[parts->name] = f;
        auto& locals = an.scope.locals_by_span_start[c.span.start_line];
        for (const auto& [ptype, pname] : parts->params) {
            locals[pname] = {ptype, {c.span.start_line, 0}};
        }
    }

    auto span_of_line = [&callables](int line) -> int {
        int best = -1;
        for (const auto& c : callables) {
            if (c.span.contains(line) &&
                (best == -1 || c.span.start_line > best)) {
                best = c.span.start_line;
            }
        }
        return best;
    };

    // statement scan, line by line (the corpus keeps one statement per line)
    bool trailing = false;
    std::vector<std::string> lines = split_lines(text, &trailing);
    for (int line = 0; line < static_cast<int>(lines.size()); ++line) {
        std::vector<Token> toks = cst::lex(lines[line]);
        if (toks.empty()) continue;
        if (toks[0].kind == Token::Kind::Preproc) continue;
        int span_start = span_of_line(line);

        // strip trailing ';' and anything after '{'
        size_t end = toks.size();
        for (size_t i = 0; i < toks.size(); ++i) {
            if (toks[i].kind == Token::Kind::Punct && toks[i].text == "{") {
                end = i;
                break;
            }
        }
        while (end > 0 && toks[end - 1].kind == Token::Kind::Punct &&
               (toks[end - 1].text == ";" || toks[end - 1].text == "}"))
            --end;
        if (end == 0) continue;

        // return <expr>
        if (toks[0].kind == Token::Kind::Keyword && toks[0].text == "return" && span_start >= 0) {
            if (end <= 1) continue;
            auto fit = std::find_if(an.scope.functions.begin(), an.scope.functions.end(),
                                    [&](const auto& kv) {
                                        return kv.second.span.start_line == span_start;
                                    });
            if (fit == an.scope.functions.end()) continue;
            TypeResult src = an.type_of(toks, 1, end, span_start, line, line);
            if (!src.name.empty()) {
                an.check_narrowing(src.name, fit->second.return_type, toks[1], toks[end - 1],
                                   line, src.const_value);
            }
            continue;
        }

        // declaration with initializer?
        if (auto decl = parse_decl_prefix(toks)) {
            auto [type, name_idx] = *decl;
            const Token& name = toks[name_idx];
            VarDecl v{type, {line, name.col}};
            if (span_start >= 0) an.scope.locals_by_span_start[span_start][name.text] = v;
            else an.scope.globals[name.text] = v;

            if (name_idx + 1 < end && toks[name_idx + 1].kind == Token::Kind::Punct &&
                toks[name_idx + 1].text == "=") {
                size_t expr_begin = name_idx + 2;
                if (expr_begin >= end) continue;
                TypeResult src = an.type_of(toks, expr_begin, end, span_start, line, line);
                if (type == "auto") {
                    // type inference: the declared variable takes the initializer type
                    if (!src.name.empty()) {
                        VarDecl inferred{src.name, {line, name.col}};
                        if (span_start >= 0)
                            an.scope.locals_by_span_start[span_start][name.text] = inferred;
                        else an.scope.globals[name.text] = inferred;
                    }
                } else if (!src.name.empty()) {
                    an.check_narrowing(src.name, type, toks[expr_begin], toks[end - 1], line,
                                       src.const_value);
                }
            }
            continue;
        }

        // plain assignment: <name> = <expr>
        if (toks[0].kind == Token::Kind::Identifier && end >= 3 &&
            toks[1].kind == Token::Kind::Punct && toks[1].text == "=") {
            auto var = an.lookup_var(toks[0].text, span_start, line);
            if (!var) {
                an.error_undeclared(toks[0], line);
                continue;
            }
            TypeResult src = an.type_of(toks, 2, end, span_start, line, line);
            if (!src.name.empty()) {
                an.check_narrowing(src.name, var->type, toks[2], toks[end - 1], line,
                                   src.const_value);
            }
            continue;
        }

        // bare call statement: sink(expr) — surface undeclared identifiers
        if (toks[0].kind == Token::Kind::Identifier && end >= 2 &&
            toks[1].kind == Token::Kind::Punct && toks[1].text == "(" && span_start >= 0) {
            if (!an.scope.functions.count(toks[0].text)) {
                an.error_undeclared(toks[0], line);
            } else {
                size_t close = Analyzer::matching_paren(toks, 1, end);
                if (close > 2) an.type_of(toks, 2, close, span_start, line, line);
            }
            continue;
        }
    }

    std::sort(an.diags.begin(), an.diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.range.start.line, a.range.start.character, a.message) <
               std::tie(b.range.start.line, b.range.start.character, b.message);
    });

    FileAnalysis out;
    out.diagnostics = std::move(an.diags);
    for (const auto& [name, f] : an.scope.functions) {
        out.symbols.push_back({SymbolInfo::Kind::Function, name,
                               TypeTable::normalize(f.return_type), f.signature, f.pos});
    }
    for (const auto& [name, v] : an.scope.globals) {
        out.symbols.push_back({SymbolInfo::Kind::Variable, name, v.type, "", v.pos});
    }
    for (const auto& [span, locals] : an.scope.locals_by_span_start) {
        for (const auto& [name, v] : locals) {
            out.symbols.push_back({SymbolInfo::Kind::Variable, name, v.type, "", v.pos});
        }
    }
    return out;
}

namespace {

// The identifier token covering `pos`, if any.
std::optional<cst::Token> token_at(const std::string& text, Position pos) {
    for (const cst::Token& t : cst::lex(text)) {
        if (t.line != pos.line) continue;
        int end_col = t.col + static_cast<int>(t.text.size());
        if (pos.character >= t.col && pos.character < end_col &&
            t.kind == cst::Token::Kind::Identifier) {
            return t;
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<SymbolInfo> symbol_at(const std::string& text, Position pos,
                                    const TypeTable& table) {
    auto tok = token_at(text, pos);
    if (!tok) return std::nullopt;
    FileAnalysis fa = analyze("", text, table);

    // prefer the declaration closest above the use (locals shadow globals;
    // analyze() already orders locals after globals)
    std::optional<SymbolInfo> best;
    for (const SymbolInfo& s : fa.symbols) {
        if (s.name != tok->text) continue;
        if (s.kind == SymbolInfo::Kind::Function) return s;
        if (s.position.line <= pos.line &&
            (!best || s.position.line >= best->position.line)) {
            best = s;
        }
    }
    return best;
}

lsp::HoverResult hover_at(const std::string& text, Position pos, const TypeTable& table) {
    lsp::HoverResult out;
    auto sym = symbol_at(text, pos, table);
    if (!sym) return out;
    if (sym->kind == SymbolInfo::Kind::Function) {
        out.summary = sym->signature;
    } else {
        out.summary = TypeTable::normalize(sym->type) + " " + sym->name;
    }
    out.available = true;
    return out;
}

std::optional<lsp::DefinitionLocation> definition_at(const std::string& file,
                                                     const std::string& text, Position pos,
                                                     const TypeTable& table) {
    auto sym = symbol_at(text, pos, table);
    if (!sym) return std::nullopt;
    lsp::DefinitionLocation loc;
    loc.file = file;
    loc.range.start = sym->position;
    loc.range.end = {sym->position.line,
                     sym->position.character + static_cast<int>(sym->name.size())};
    return loc;
}

}  // namespace warnfix::minicheck
