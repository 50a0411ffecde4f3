#include "warnfix/context.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "warnfix/cst.hpp"
#include "warnfix/prompt_format.hpp"
#include "warnfix/util.hpp"

namespace warnfix {

using nlohmann::ordered_json;

namespace {

std::string slice_lines(const std::vector<std::string>& lines, int start, int end_incl,
                        bool file_trailing_newline) {
    std::string out;
    for (int i = start; i <= end_incl && i < static_cast<int>(lines.size()); ++i) {
        out += lines[i];
        if (i < end_incl || file_trailing_newline || i + 1 < static_cast<int>(lines.size()))
            out += '\n';
    }
    return out;
}

}  // namespace

FunctionSnippet enclosing_function(const std::string& file_text, Position warning_pos,
                                   const std::string& file) {
    bool trailing = false;
    std::vector<std::string> lines = split_lines(file_text, &trailing);
    if (lines.empty()) throw EmptyContext("empty file");
    if (warning_pos.line < 0 || warning_pos.line >= static_cast<int>(lines.size())) {
        throw EmptyContext("warning position outside file: line " +
                           std::to_string(warning_pos.line));
    }

    FunctionSnippet out;
    out.file = file;
    auto callable = cst::innermost_enclosing(file_text, warning_pos.line);
    if (callable) {
        out.span = callable->span;
        out.signature = callable->signature;
    } else {
        out.span.start_line = std::max(0, warning_pos.line - kFallbackWindow);
        out.span.end_line =
            std::min(static_cast<int>(lines.size()) - 1, warning_pos.line + kFallbackWindow);
        out.fallback_window = true;
    }
    out.text = slice_lines(lines, out.span.start_line, out.span.end_line, trailing);
    return out;
}

std::vector<std::pair<std::string, Position>> collect_identifiers(const FunctionSnippet& snippet,
                                                                  Position warning_pos) {
    std::vector<cst::Token> toks = cst::lex(snippet.text);
    const int rel_line = warning_pos.line - snippet.span.start_line;

    std::vector<std::pair<std::string, Position>> out;
    std::set<std::pair<std::string, int>> seen;  // (name, absolute line+col key)
    auto push = [&](const std::string& name, int line, int col) {
        Position abs{line + snippet.span.start_line, col};
        auto key = std::make_pair(name, abs.line * 10000 + abs.character);
        if (seen.insert(key).second) out.emplace_back(name, abs);
    };

    std::vector<const cst::Token*> on_line;
    for (const auto& t : toks) {
        if (t.line == rel_line && cst::is_identifier_token(t)) on_line.push_back(&t);
    }
    for (const cst::Token* t : on_line) push(t->text, t->line, t->col);

    // earliest prior occurrence (if any) of each warning-line identifier
    std::vector<std::pair<std::string, Position>> prior;
    for (const cst::Token* wt : on_line) {
        const cst::Token* earliest = nullptr;
        for (const auto& t : toks) {
            if (t.line >= rel_line) break;
            if (cst::is_identifier_token(t) && t.text == wt->text) {
                earliest = &t;
                break;
            }
        }
        if (earliest) prior.emplace_back(earliest->text,
                                         Position{earliest->line, earliest->col});
    }
    std::sort(prior.begin(), prior.end(), [](const auto& a, const auto& b) {
        return std::tie(a.second.line, a.second.character) <
               std::tie(b.second.line, b.second.character);
    });
    for (const auto& [name, rel] : prior) push(name, rel.line, rel.character);
    return out;
}

std::optional<Bounds> parse_bounds_phrase(const std::string& text) {
    static const std::regex between_re(R"(between\s+(-?\d+)\s+and\s+(-?\d+))",
                                       std::regex::icase);
    static const std::regex to_re(R"((-?\d+)\s+to\s+(-?\d+))");
    static const std::regex interval_re(R"(in\s*\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\])");

    std::smatch m;
    if (std::regex_search(text, m, between_re) || std::regex_search(text, m, to_re) ||
        std::regex_search(text, m, interval_re)) {
        long long a = std::stoll(m[1]), b = std::stoll(m[2]);
        if (a > b) std::swap(a, b);
        return Bounds{a, b};
    }
    return std::nullopt;
}

ModelRequest build_summarize_prompt(const std::string& signature, const std::string& body) {
    ModelRequest req;
    req.system = prompt::kSystemPersona;
    std::string text;
    text += "Analyze the following C++ function and describe the possible range of its return "
            "values.\n\n";
    text += std::string(prompt::kSignature) + "\n" + signature + "\n\n";
    text += std::string(prompt::kImplementation) + "\n" + body + "\n\n";
    text += "Reply with a short explanation. When the bounds are certain, state them exactly "
            "once using the form \"between A and B\".";
    req.messages.push_back({ChatMessage::Role::Human, std::move(text)});
    req.temperature = 0.0;
    req.sample_count = 1;
    return req;
}

ReturnRangeAnalysis summarize_return_range(const std::string& signature, const std::string& body,
                                           ModelGateway& gateway) {
    ModelResponse resp = gateway.sample(build_summarize_prompt(signature, body));
    ReturnRangeAnalysis out;
    out.function_signature = signature;
    out.range_description = resp.samples.at(0);
    out.bounds = parse_bounds_phrase(out.range_description);
    return out;
}

std::optional<std::pair<std::string, std::string>> conversion_from_message(
    const std::string& message) {
    static const std::regex re(R"(implicit conversion[^']*'([^']+)'[^']*\bto\b[^']*'([^']+)')");
    std::smatch m;
    if (!std::regex_search(message, m, re)) return std::nullopt;
    return std::make_pair(m[1].str(), m[2].str());
}

std::string extract_type_from_hover(const std::string& summary, const std::string& name) {
    // clangd markdown: "Type: `long long`"
    static const std::regex type_re(R"(Type:\s*`([^`]+)`)");
    std::smatch m;
    if (std::regex_search(summary, m, type_re)) return trim(m[1].str());

    // "long long bigNumber" or "int getSomeValue()"
    std::string s = trim(summary);
    size_t at = s.find(name);
    if (at != std::string::npos && at > 0) {
        std::string prefix = trim(s.substr(0, at));
        if (!prefix.empty()) {
            size_t eq = prefix.find('=');
            if (eq != std::string::npos) prefix = trim(prefix.substr(0, eq));
            return prefix;
        }
    }
    return s;
}

namespace {

// Call sites (callee name + position) on the given relative line of a snippet.
std::vector<std::pair<std::string, Position>> calls_on_line(const FunctionSnippet& snippet,
                                                            int abs_line) {
    std::vector<std::pair<std::string, Position>> out;
    std::vector<cst::Token> toks = cst::lex(snippet.text);
    int rel = abs_line - snippet.span.start_line;
    for (size_t i = 0; i + 1 < toks.size(); ++i) {
        if (toks[i].line != rel) continue;
        if (!cst::is_identifier_token(toks[i])) continue;
        if (toks[i + 1].kind == cst::Token::Kind::Punct && toks[i + 1].text == "(") {
            out.emplace_back(toks[i].text,
                             Position{abs_line, toks[i].col});
        }
    }
    return out;
}

std::string definition_line_text(lsp::LspFacade& lsp, const lsp::DefinitionLocation& loc) {
    try {
        const std::string& text = lsp.document_text(loc.file);
        std::vector<std::string> lines = split_lines(text);
        if (loc.range.start.line < static_cast<int>(lines.size())) {
            return trim(lines[loc.range.start.line]);
        }
    } catch (...) {
        try {
            std::string text = read_file(loc.file);
            std::vector<std::string> lines = split_lines(text);
            if (loc.range.start.line < static_cast<int>(lines.size())) {
                return trim(lines[loc.range.start.line]);
            }
        } catch (...) {
        }
    }
    return "";
}

}  // namespace

WarningContext assemble(const FixUnit& unit, lsp::LspFacade& lsp, ModelGateway& gateway) {
    if (unit.warnings.empty()) throw EmptyContext("unit has no warnings");
    const Diagnostic& primary = unit.warnings.front();

    WarningContext ctx;
    ctx.unit = unit;
    const std::string& file_text = lsp.document_text(unit.file);
    ctx.snippet = enclosing_function(file_text, primary.range.start, unit.file);

    auto names = collect_identifiers(ctx.snippet, primary.range.start);

    // hover + definition per identifier
    std::map<std::string, lsp::DefinitionResult> definitions;
    for (const auto& [name, pos] : names) {
        IdentifierInfo info;
        info.name = name;
        info.position = pos;
        try {
            info.hover = lsp.hover(unit.file, pos);
        } catch (const lsp::LspError&) {
            ctx.partial = true;
        }
        try {
            lsp::DefinitionResult def = lsp.definition(unit.file, pos);
            if (!def.locations.empty()) {
                std::string text = definition_line_text(lsp, def.locations.front());
                if (!text.empty()) info.definition_snippet = text;
            }
            definitions[name] = std::move(def);
        } catch (const lsp::LspError&) {
            ctx.partial = true;
        }
        ctx.identifiers.push_back(std::move(info));
    }

    // return-range summaries for callees on the warning line and on the prior
    // occurrence lines the identifier search surfaced (depth 1)
    std::set<int> candidate_lines = {primary.range.start.line};
    for (const auto& [name, pos] : names) candidate_lines.insert(pos.line);

    std::set<std::string> summarized;
    for (int line : candidate_lines) {
        for (const auto& [callee, pos] : calls_on_line(ctx.snippet, line)) {
            if (callee == "safe_int_cast" || callee == "static_cast") continue;
            if (!summarized.insert(callee).second) continue;
            lsp::DefinitionResult def;
            auto it = definitions.find(callee);
            if (it != definitions.end()) {
                def = it->second;
            } else {
                try {
                    def = lsp.definition(unit.file, pos);
                } catch (const lsp::LspError&) {
                    ctx.partial = true;
                    continue;
                }
            }
            if (def.locations.empty()) continue;
            const auto& loc = def.locations.front();
            std::string def_text;
            try {
                def_text = lsp.document_text(loc.file);
            } catch (...) {
                try {
                    def_text = read_file(loc.file);
                } catch (...) {
                    ctx.partial = true;
                    continue;
                }
            }
            auto callable = cst::innermost_enclosing(def_text, loc.range.start.line);
            if (!callable) continue;
            bool trailing = false;
            std::vector<std::string> def_lines = split_lines(def_text, &trailing);
            std::string body = slice_lines(def_lines, callable->body_open_line,
                                           callable->span.end_line, trailing);
            try {
                ctx.return_ranges.push_back(
                    summarize_return_range(callable->signature, body, gateway));
            } catch (const GatewayError&) {
                ReturnRangeAnalysis failed;
                failed.function_signature = callable->signature;
                failed.available = false;
                ctx.return_ranges.push_back(std::move(failed));
                ctx.partial = true;
            }
        }
    }

    // conversion pair: the compiler message names the exact types; hover is fallback
    if (auto conv = conversion_from_message(primary.message)) {
        ctx.source_type = conv->first;
        ctx.target_type = conv->second;
    } else {
        for (const auto& info : ctx.identifiers) {
            if (!info.hover.available) continue;
            std::string t = extract_type_from_hover(info.hover.summary, info.name);
            if (t.empty()) continue;
            if (ctx.target_type.empty()) ctx.target_type = t;   // first identifier: assigned-to
            else if (ctx.source_type.empty()) ctx.source_type = t;
        }
        if (ctx.source_type.empty() || ctx.target_type.empty()) {
            ctx.partial = true;
            if (ctx.source_type.empty()) ctx.source_type = "unknown";
            if (ctx.target_type.empty()) ctx.target_type = "unknown";
        }
    }
    return ctx;
}

ordered_json WarningContext::to_json() const {
    ordered_json j;
    j["unit"] = unit_to_json(unit);
    j["snippet"] = {{"file", snippet.file},
                    {"span", {snippet.span.start_line, snippet.span.end_line}},
                    {"signature", snippet.signature},
                    {"fallback_window", snippet.fallback_window},
                    {"text", snippet.text}};
    j["identifiers"] = ordered_json::array();
    for (const auto& i : identifiers) {
        ordered_json ji;
        ji["name"] = i.name;
        ji["position"] = {i.position.line, i.position.character};
        ji["hover"] = {{"available", i.hover.available}, {"summary", i.hover.summary}};
        if (i.definition_snippet) ji["definition_snippet"] = *i.definition_snippet;
        j["identifiers"].push_back(std::move(ji));
    }
    j["return_ranges"] = ordered_json::array();
    for (const auto& r : return_ranges) {
        ordered_json jr;
        jr["function_signature"] = r.function_signature;
        jr["range_description"] = r.range_description;
        if (r.bounds) jr["bounds"] = {r.bounds->min, r.bounds->max};
        jr["available"] = r.available;
        j["return_ranges"].push_back(std::move(jr));
    }
    j["source_type"] = source_type;
    j["target_type"] = target_type;
    j["partial"] = partial;
    return j;
}

}  // namespace warnfix
