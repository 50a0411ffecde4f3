#include "warnfix/diagnostics.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "warnfix/util.hpp"

namespace warnfix {

using nlohmann::json;
using nlohmann::ordered_json;

const std::set<std::string>& default_dataloss_codes() {
    static const std::set<std::string> codes = {
        "-Wimplicit-int-conversion",
        "-Wimplicit-float-conversion",
        "-Wshorten-64-to-32",
        "-Wconversion",
    };
    return codes;
}

WarningClass classify(const Diagnostic& diag, const std::set<std::string>& dataloss_codes) {
    if (diag.in_macro_expansion) {
        // The LSP cannot give reliable context for macro-generated code; keep these out.
        return {WarningVariant::OutOfScope, std::string("macro")};
    }
    if (dataloss_codes.count(diag.code)) {
        std::string sub = diag.code;
        if (sub.rfind("-W", 0) == 0) sub = sub.substr(2);
        return {WarningVariant::ImplicitDataLoss, sub};
    }
    return {WarningVariant::OutOfScope, std::nullopt};
}

namespace {

bool position_less(const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.file, a.range.start.line, a.range.start.character, a.code, a.message) <
           std::tie(b.file, b.range.start.line, b.range.start.character, b.code, b.message);
}

}  // namespace

std::vector<FixUnit> group_into_units(const std::vector<Diagnostic>& diags,
                                      const std::map<std::string, std::vector<LineSpan>>& spans) {
    std::vector<Diagnostic> sorted = diags;
    std::sort(sorted.begin(), sorted.end(), position_less);
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    struct Key {
        std::string file;
        int span_start;   // -1 for no-span singletons
        int singleton_line;
    };
    std::vector<std::pair<Key, FixUnit>> units;

    auto find_span = [&spans](const Diagnostic& d) -> std::optional<LineSpan> {
        auto it = spans.find(d.file);
        if (it == spans.end()) return std::nullopt;
        for (const LineSpan& s : it->second) {
            if (s.contains(d.range.start.line)) return s;
        }
        return std::nullopt;
    };

    for (const Diagnostic& d : sorted) {
        std::optional<LineSpan> span = find_span(d);
        if (span) {
            auto it = std::find_if(units.begin(), units.end(), [&](const auto& p) {
                return p.first.file == d.file && p.first.span_start == span->start_line;
            });
            if (it != units.end()) {
                it->second.warnings.push_back(d);
                continue;
            }
            FixUnit u;
            u.file = d.file;
            u.warnings.push_back(d);
            u.function_span = span;
            units.push_back({{d.file, span->start_line, 0}, std::move(u)});
        } else {
            FixUnit u;
            u.file = d.file;
            u.warnings.push_back(d);
            units.push_back({{d.file, -1, d.range.start.line}, std::move(u)});
        }
    }

    std::vector<FixUnit> out;
    out.reserve(units.size());
    for (auto& [key, u] : units) out.push_back(std::move(u));
    std::sort(out.begin(), out.end(), [](const FixUnit& a, const FixUnit& b) {
        return std::tie(a.file, a.warnings.front().range.start.line) <
               std::tie(b.file, b.warnings.front().range.start.line);
    });
    for (size_t i = 0; i < out.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "u%04zu", i + 1);
        out[i].id = buf;
    }
    return out;
}

std::vector<Diagnostic> parse_compiler_output(const std::string& text) {
    static const std::regex line_re(
        R"(^(.+?):(\d+):(\d+): (error|warning|note): (.*?)(?: \[(-W[\w=-]+)\])?$)");
    std::vector<Diagnostic> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::smatch m;
        if (!std::regex_match(line, m, line_re)) continue;
        const std::string kind = m[4];
        if (kind == "note") {
            if (!out.empty() && m[5].str().find("expanded from macro") != std::string::npos) {
                out.back().in_macro_expansion = true;
            }
            continue;
        }
        Diagnostic d;
        d.file = m[1];
        int line1 = std::stoi(m[2]);
        int col1 = std::stoi(m[3]);
        d.range.start = {line1 - 1, col1 - 1};
        d.range.end = d.range.start;
        d.severity = kind == "error" ? Severity::Error : Severity::Warning;
        d.message = m[5];
        d.code = m[6].matched ? m[6].str() : "";
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<Diagnostic> diagnostics_from_lsp(const std::string& file, const json& params) {
    std::vector<Diagnostic> out;
    if (!params.contains("diagnostics") || !params["diagnostics"].is_array()) return out;
    for (const auto& j : params["diagnostics"]) {
        Diagnostic d;
        d.file = file;
        const auto& r = j.value("range", json::object());
        const auto& s = r.value("start", json::object());
        const auto& e = r.value("end", json::object());
        d.range.start = {s.value("line", 0), s.value("character", 0)};
        d.range.end = {e.value("line", 0), e.value("character", 0)};
        int sev = j.value("severity", 2);
        d.severity = sev == 1   ? Severity::Error
                     : sev == 2 ? Severity::Warning
                     : sev == 3 ? Severity::Info
                                : Severity::Hint;
        if (j.contains("code")) {
            if (j["code"].is_string()) d.code = j["code"].get<std::string>();
            else if (j["code"].is_number_integer()) d.code = std::to_string(j["code"].get<long long>());
        }
        d.message = j.value("message", "");
        if (j.contains("relatedInformation")) {
            for (const auto& rel : j["relatedInformation"]) {
                if (rel.value("message", std::string()).find("expanded from macro") !=
                    std::string::npos) {
                    d.in_macro_expansion = true;
                }
            }
        }
        out.push_back(std::move(d));
    }
    return out;
}

const char* severity_name(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Info: return "info";
        case Severity::Hint: return "hint";
    }
    return "warning";
}

ordered_json diagnostic_to_json(const Diagnostic& d) {
    ordered_json j;
    j["file"] = d.file;
    j["range"] = {{"start", {{"line", d.range.start.line}, {"character", d.range.start.character}}},
                  {"end", {{"line", d.range.end.line}, {"character", d.range.end.character}}}};
    j["severity"] = severity_name(d.severity);
    j["code"] = d.code;
    j["message"] = d.message;
    if (d.in_macro_expansion) j["in_macro_expansion"] = true;
    return j;
}

ordered_json unit_to_json(const FixUnit& u) {
    ordered_json j;
    j["id"] = u.id;
    j["file"] = u.file;
    if (u.function_span) {
        j["function_span"] = {u.function_span->start_line, u.function_span->end_line};
    } else {
        j["function_span"] = nullptr;
    }
    j["warnings"] = ordered_json::array();
    for (const auto& w : u.warnings) j["warnings"].push_back(diagnostic_to_json(w));
    return j;
}

std::string units_to_jsonl(const std::vector<FixUnit>& units) {
    std::string out;
    for (const auto& u : units) {
        out += unit_to_json(u).dump();
        out += '\n';
    }
    return out;
}

}  // namespace warnfix
