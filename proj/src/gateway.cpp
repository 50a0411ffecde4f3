#include "warnfix/gateway.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "warnfix/cst.hpp"
#include "warnfix/prompt_format.hpp"
#include "warnfix/util.hpp"

namespace warnfix {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// TypeTable

std::string TypeTable::normalize(const std::string& type_name) {
    // strip cv-qualifiers, references, and canonicalize multiword spellings
    std::vector<std::string> words;
    std::string cur;
    for (char c : type_name) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            cur.push_back(c);
        } else {
            if (!cur.empty()) words.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));

    std::vector<std::string> kept;
    for (auto& w : words) {
        if (w == "const" || w == "volatile" || w == "struct" || w == "std") continue;
        kept.push_back(w);
    }
    // canonical order: unsigned/signed first, then base words
    std::string out;
    bool is_unsigned = false, is_signed = false;
    std::vector<std::string> base;
    for (auto& w : kept) {
        if (w == "unsigned") is_unsigned = true;
        else if (w == "signed") is_signed = true;
        else if (w != "int" || kept.size() == 1 ||
                 (std::count(kept.begin(), kept.end(), "long") == 0 &&
                  std::count(kept.begin(), kept.end(), "short") == 0))
            base.push_back(w);
    }
    if (base.empty()) base.push_back("int");
    if (is_unsigned) out = "unsigned ";
    else if (is_signed && base.size() == 1 && base[0] == "char") out = "signed ";
    for (size_t i = 0; i < base.size(); ++i) {
        if (i) out += ' ';
        out += base[i];
    }
    return out;
}

TypeTable TypeTable::lp64() {
    TypeTable t;
    auto add = [&t](const char* name, int bits, bool sign) { t.table_[name] = {bits, sign}; };
    add("char", 8, true);
    add("signed char", 8, true);
    add("unsigned char", 8, false);
    add("short", 16, true);
    add("unsigned short", 16, false);
    add("int", 32, true);
    add("unsigned", 32, false);
    add("unsigned int", 32, false);
    add("long", 64, true);
    add("unsigned long", 64, false);
    add("long long", 64, true);
    add("unsigned long long", 64, false);
    add("int8_t", 8, true);
    add("uint8_t", 8, false);
    add("int16_t", 16, true);
    add("uint16_t", 16, false);
    add("int32_t", 32, true);
    add("uint32_t", 32, false);
    add("int64_t", 64, true);
    add("uint64_t", 64, false);
    add("size_t", 64, false);
    add("ptrdiff_t", 64, true);
    return t;
}

std::optional<IntLayout> TypeTable::lookup(const std::string& type_name) const {
    auto it = table_.find(normalize(type_name));
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

__int128 TypeTable::min_of(IntLayout l) {
    if (!l.is_signed) return 0;
    return -(static_cast<__int128>(1) << (l.bits - 1));
}

__int128 TypeTable::max_of(IntLayout l) {
    if (!l.is_signed) return (static_cast<__int128>(1) << l.bits) - 1;
    return (static_cast<__int128>(1) << (l.bits - 1)) - 1;
}

std::string layout_description(IntLayout l) {
    return std::to_string(l.bits) + "-bit " + (l.is_signed ? "signed" : "unsigned") + " integer";
}

// ---------------------------------------------------------------------------
// oracle_decide

OracleVerdict oracle_decide(const std::string& source_type, const std::string& target_type,
                            const std::optional<Bounds>& bounds, const TypeTable& table) {
    auto tgt = table.lookup(target_type);
    auto src = table.lookup(source_type);
    if (!tgt || !src) return {true, OracleReason::Unknown, std::nullopt};

    __int128 tmin = TypeTable::min_of(*tgt), tmax = TypeTable::max_of(*tgt);
    if (bounds) {
        bool fits = static_cast<__int128>(bounds->min) >= tmin &&
                    static_cast<__int128>(bounds->max) <= tmax;
        return {!fits, fits ? OracleReason::SourceRangeFits : OracleReason::TargetCannotHold,
                bounds};
    }
    bool fits = TypeTable::min_of(*src) >= tmin && TypeTable::max_of(*src) <= tmax;
    return {!fits, fits ? OracleReason::SourceRangeFits : OracleReason::TargetCannotHold,
            std::nullopt};
}

const char* oracle_reason_name(OracleReason r) {
    switch (r) {
        case OracleReason::SourceRangeFits: return "source_range_fits";
        case OracleReason::TargetCannotHold: return "target_cannot_hold";
        case OracleReason::Unknown: return "unknown";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// canonical request text / ballots

std::string canonical_request_text(const ModelRequest& req) {
    std::ostringstream ss;
    ss << "system\n" << req.system << "\n";
    for (const auto& m : req.messages) {
        ss << (m.role == ChatMessage::Role::Human ? "human\n" : "assistant\n") << m.text << "\n";
    }
    char tbuf[32];
    std::snprintf(tbuf, sizeof(tbuf), "%.3f", req.temperature);
    ss << "temperature " << tbuf << "\nn " << req.sample_count << "\n";
    return ss.str();
}

std::string render_decision_ballot(bool needs_check) {
    std::string out;
    out += "1. Types and ranges:\n";
    out += "   - compared the source value range against the target type range\n";
    out += "2. Correctness:\n";
    out += needs_check ? "   - the source range can exceed what the target represents\n"
                       : "   - no data loss risk, every possible value fits the target\n";
    out += "3. Performance:\n";
    out += needs_check ? "   - a guarded cast adds one branch, required here\n"
                       : "   - a range check would add overhead without benefits\n";
    out += "4. Recommendation:\n";
    out += needs_check ? "   Implement the range check before converting.\n"
                       : "   No range check needed.\n";
    out += std::string("DECISION: ") +
           (needs_check ? prompt::kMarkerNeeded : prompt::kMarkerNotNeeded);
    return out;
}

// ---------------------------------------------------------------------------
// MockBackend

MockBackend MockBackend::scripted(std::vector<std::string> samples) {
    MockBackend b;
    b.mode_ = Mode::Scripted;
    b.script_ = std::move(samples);
    return b;
}

MockBackend MockBackend::from_transcript(std::vector<TranscriptEntry> entries) {
    MockBackend b;
    b.mode_ = Mode::Transcript;
    b.entries_ = std::move(entries);
    return b;
}

MockBackend MockBackend::from_transcript_file(const std::string& path) {
    std::vector<TranscriptEntry> entries;
    std::ifstream in(path);
    if (!in) throw GatewayError("cannot open transcript: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        json j = json::parse(line);
        TranscriptEntry e;
        if (j.contains("match")) {
            const auto& m = j["match"];
            if (m.contains("digest")) e.match_digest = m["digest"].get<std::string>();
            if (m.contains("contains"))
                for (const auto& s : m["contains"]) e.match_contains.push_back(s);
        }
        if (j.contains("contains"))
            for (const auto& s : j["contains"]) e.match_contains.push_back(s);
        for (const auto& s : j.at("samples")) e.samples.push_back(s);
        e.once = j.value("once", false);
        entries.push_back(std::move(e));
    }
    return from_transcript(std::move(entries));
}

MockBackend MockBackend::noisy_decisions(std::vector<bool> truths, double p, uint64_t seed) {
    MockBackend b;
    b.mode_ = Mode::Noisy;
    b.truths_ = std::move(truths);
    b.accuracy_ = p;
    b.seed_ = seed;
    return b;
}

ModelResponse MockBackend::sample(const ModelRequest& req) {
    if (req.sample_count < 1) throw GatewayError("sample_count must be >= 1");
    if (req.messages.empty()) throw GatewayError("messages must be nonempty");
    std::lock_guard<std::mutex> lock(*mu_);
    uint64_t ordinal = next_ordinal_++;

    ModelResponse resp;
    resp.backend_id = "mock";
    switch (mode_) {
        case Mode::Scripted: {
            if (script_pos_ + static_cast<size_t>(req.sample_count) > script_.size()) {
                throw SchemaError("scripted mock exhausted: need " +
                                  std::to_string(req.sample_count) + " more samples");
            }
            for (int i = 0; i < req.sample_count; ++i) resp.samples.push_back(script_[script_pos_++]);
            return resp;
        }
        case Mode::Transcript: {
            const std::string canonical = canonical_request_text(req);
            const std::string digest = fnv1a_hex(canonical);
            for (const auto& e : entries_) {
                if (e.once && e.used) continue;
                bool match = false;
                if (e.match_digest && *e.match_digest == digest) match = true;
                if (!match && !e.match_contains.empty()) {
                    match = std::all_of(e.match_contains.begin(), e.match_contains.end(),
                                        [&](const std::string& s) {
                                            return canonical.find(s) != std::string::npos;
                                        });
                }
                if (!match) continue;
                if (e.samples.size() != static_cast<size_t>(req.sample_count)) {
                    throw SchemaError("transcript entry has " + std::to_string(e.samples.size()) +
                                      " samples, request wants " +
                                      std::to_string(req.sample_count));
                }
                e.used = true;
                resp.samples = e.samples;
                return resp;
            }
            throw GatewayError("no transcript entry matches request (digest " + digest + ")");
        }
        case Mode::Noisy: {
            bool truth = truths_.empty() ? true : truths_[ordinal % truths_.size()];
            std::mt19937_64 rng(seed_ ^ (0x9e3779b97f4a7c15ULL * (ordinal + 1)));
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (int i = 0; i < req.sample_count; ++i) {
                bool correct = u(rng) < accuracy_;
                resp.samples.push_back(render_decision_ballot(correct ? truth : !truth));
            }
            return resp;
        }
    }
    throw GatewayError("unreachable mock mode");
}

// ---------------------------------------------------------------------------
// OracleBackend

namespace {

using Int = __int128;

struct Interval {
    Int lo = 0, hi = 0;
};

struct EvalError {};

// Tiny constant-folding interval evaluator over the token forms the fixture
// corpus uses: parameters, integer literals, %, &, *, +, -, >>, <<, unary
// minus, parenthesized casts, and the ternary operator (union of branches).
class IntervalEval {
public:
    IntervalEval(const std::vector<cst::Token>& toks,
                 const std::map<std::string, Interval>& params)
        : toks_(toks), params_(params) {}

    Interval parse(size_t begin, size_t end) {
        pos_ = begin;
        end_ = end;
        Interval v = ternary();
        if (pos_ != end_) throw EvalError{};
        return v;
    }

private:
    const std::vector<cst::Token>& toks_;
    const std::map<std::string, Interval>& params_;
    size_t pos_ = 0, end_ = 0;

    bool at_punct(const char* p) const {
        return pos_ < end_ && toks_[pos_].kind == cst::Token::Kind::Punct && toks_[pos_].text == p;
    }

    Interval ternary() {
        // the condition's value never matters for the result range; skip it
        int depth = 0;
        for (size_t k = pos_; k < end_; ++k) {
            if (toks_[k].kind != cst::Token::Kind::Punct) continue;
            if (toks_[k].text == "(") ++depth;
            else if (toks_[k].text == ")") --depth;
            else if (toks_[k].text == ":" && depth == 0) break;
            else if (toks_[k].text == "?" && depth == 0) {
                pos_ = k + 1;
                Interval a = ternary();
                if (!at_punct(":")) throw EvalError{};
                ++pos_;
                Interval b = ternary();
                return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
            }
        }
        return additive();
    }

    Interval additive() {
        Interval v = multiplicative();
        while (at_punct("+") || at_punct("-")) {
            bool add = toks_[pos_].text == "+";
            ++pos_;
            Interval r = multiplicative();
            if (add) v = {v.lo + r.lo, v.hi + r.hi};
            else v = {v.lo - r.hi, v.hi - r.lo};
        }
        return v;
    }

    Interval multiplicative() {
        Interval v = shift();
        while (at_punct("*") || at_punct("%") || at_punct("&")) {
            std::string op = toks_[pos_].text;
            ++pos_;
            Interval r = shift();
            if (op == "*") {
                Int c[4] = {v.lo * r.lo, v.lo * r.hi, v.hi * r.lo, v.hi * r.hi};
                v = {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
            } else if (op == "%") {
                if (r.lo != r.hi || r.lo <= 0) throw EvalError{};
                Int k = r.lo;
                if (v.lo >= 0) v = {0, std::min(v.hi, k - 1)};
                else v = {-(k - 1), k - 1};
            } else {  // &
                if (r.lo != r.hi || r.lo < 0) throw EvalError{};
                if (v.lo >= 0) v = {0, std::min(v.hi, r.lo)};
                else v = {0, r.lo};
            }
        }
        return v;
    }

    Interval shift() {
        Interval v = unary();
        while (at_punct(">>") || at_punct("<<")) {
            bool right = toks_[pos_].text == ">>";
            ++pos_;
            Interval r = unary();
            if (r.lo != r.hi || r.lo < 0 || r.lo > 62 || v.lo < 0) throw EvalError{};
            Int k = r.lo;
            if (right) v = {v.lo >> k, v.hi >> k};
            else v = {v.lo << k, v.hi << k};
        }
        return v;
    }

    Interval unary() {
        if (at_punct("-")) {
            ++pos_;
            Interval v = unary();
            return {-v.hi, -v.lo};
        }
        if (at_punct("+")) {
            ++pos_;
            return unary();
        }
        if (at_punct("(")) {
            // parenthesized expression or C-style cast "(type) expr"
            size_t close = match_forward(pos_);
            bool all_type_tokens = true;
            for (size_t k = pos_ + 1; k < close; ++k) {
                if (toks_[k].kind == cst::Token::Kind::Keyword ||
                    (toks_[k].kind == cst::Token::Kind::Identifier &&
                     toks_[k].text.find("int") != std::string::npos))
                    continue;
                all_type_tokens = false;
                break;
            }
            if (all_type_tokens && close + 1 < end_ && close > pos_ + 1) {
                pos_ = close + 1;
                return unary();  // cast is a pass-through for value ranges
            }
            ++pos_;
            Interval v = ternary();
            if (!at_punct(")")) throw EvalError{};
            ++pos_;
            return v;
        }
        return primary();
    }

    size_t match_forward(size_t open) const {
        int depth = 0;
        for (size_t k = open; k < end_; ++k) {
            if (toks_[k].kind != cst::Token::Kind::Punct) continue;
            if (toks_[k].text == "(") ++depth;
            else if (toks_[k].text == ")") {
                if (--depth == 0) return k;
            }
        }
        throw EvalError{};
    }

    Interval primary() {
        if (pos_ >= end_) throw EvalError{};
        const cst::Token& t = toks_[pos_];
        if (t.kind == cst::Token::Kind::Number) {
            ++pos_;
            std::string digits;
            for (char c : t.text) {
                if (std::isdigit(static_cast<unsigned char>(c))) digits.push_back(c);
                else if (c == 'x' || c == 'X') { digits.clear(); digits = "x"; }
                else if (digits == "x" || (digits.size() > 1 && digits[0] == 'x'))
                    digits.push_back(c);
            }
            Int v = 0;
            if (!digits.empty() && digits[0] == 'x') {
                for (size_t k = 1; k < digits.size(); ++k) {
                    char c = static_cast<char>(std::tolower(digits[k]));
                    int d = c >= 'a' ? c - 'a' + 10 : c - '0';
                    if (d < 0 || d > 15) break;
                    v = v * 16 + d;
                }
            } else {
                for (char c : digits) v = v * 10 + (c - '0');
            }
            return {v, v};
        }
        if (t.kind == cst::Token::Kind::Identifier) {
            auto it = params_.find(t.text);
            ++pos_;
            if (it == params_.end()) throw EvalError{};
            if (at_punct("(")) throw EvalError{};  // function call: unknown range
            return it->second;
        }
        throw EvalError{};
    }
};

std::map<std::string, Interval> param_ranges(const std::string& signature, const TypeTable& table) {
    std::map<std::string, Interval> out;
    size_t open = signature.find('(');
    size_t close = signature.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close <= open) return out;
    std::string params = signature.substr(open + 1, close - open - 1);
    std::istringstream ss(params);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t = trim(item);
        if (t.empty()) continue;
        size_t name_start = t.size();
        while (name_start > 0 &&
               (std::isalnum(static_cast<unsigned char>(t[name_start - 1])) ||
                t[name_start - 1] == '_'))
            --name_start;
        std::string name = t.substr(name_start);
        std::string type = trim(t.substr(0, name_start));
        if (name.empty() || type.empty()) continue;
        auto layout = table.lookup(type);
        if (!layout) continue;
        out[name] = {TypeTable::min_of(*layout), TypeTable::max_of(*layout)};
    }
    return out;
}

}  // namespace

OracleBackend::OracleBackend(TypeTable table) : table_(std::move(table)) {}

namespace {

// Body locals declared with a known integer type contribute their type's range;
// a later plain reassignment makes the variable's range unknowable again.
void add_body_locals(const std::vector<cst::Token>& toks, const TypeTable& table,
                     std::map<std::string, Interval>& ranges) {
    static const std::set<std::string> type_kw = {"char", "int",   "long",    "short",
                                                  "signed", "unsigned", "const"};
    for (size_t i = 0; i + 1 < toks.size(); ++i) {
        if (toks[i].kind != cst::Token::Kind::Identifier) continue;
        if (!(toks[i + 1].kind == cst::Token::Kind::Punct && toks[i + 1].text == "=")) continue;
        bool declared_here =
            i > 0 && ((toks[i - 1].kind == cst::Token::Kind::Keyword &&
                       type_kw.count(toks[i - 1].text)) ||
                      (toks[i - 1].kind == cst::Token::Kind::Identifier &&
                       table.lookup(toks[i - 1].text).has_value()));
        if (declared_here) {
            std::string type;
            for (size_t k = i; k-- > 0;) {
                bool type_word = (toks[k].kind == cst::Token::Kind::Keyword &&
                                  type_kw.count(toks[k].text)) ||
                                 (toks[k].kind == cst::Token::Kind::Identifier &&
                                  table.lookup(toks[k].text).has_value());
                if (!type_word) break;
                type = toks[k].text + (type.empty() ? "" : " ") + type;
            }
            if (auto layout = table.lookup(type); layout && !ranges.count(toks[i].text)) {
                ranges[toks[i].text] = {TypeTable::min_of(*layout), TypeTable::max_of(*layout)};
            }
        } else {
            ranges.erase(toks[i].text);
        }
    }
}

}  // namespace

std::optional<Bounds> OracleBackend::analyze_return_range(const std::string& signature,
                                                          const std::string& body) const {
    std::map<std::string, Interval> params = param_ranges(signature, table_);
    std::vector<cst::Token> toks = cst::lex(body);
    add_body_locals(toks, table_, params);

    bool any = false;
    Interval acc{0, 0};
    for (size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind != cst::Token::Kind::Keyword || toks[i].text != "return") continue;
        size_t j = i + 1;
        while (j < toks.size() &&
               !(toks[j].kind == cst::Token::Kind::Punct && toks[j].text == ";"))
            ++j;
        if (j == i + 1 || j == toks.size()) return std::nullopt;
        try {
            Interval v = IntervalEval(toks, params).parse(i + 1, j);
            if (!any) acc = v;
            else acc = {std::min(acc.lo, v.lo), std::max(acc.hi, v.hi)};
            any = true;
        } catch (const EvalError&) {
            return std::nullopt;
        }
        i = j;
    }
    if (!any) return std::nullopt;
    constexpr Int kLLMin = std::numeric_limits<long long>::min();
    constexpr Int kLLMax = std::numeric_limits<long long>::max();
    if (acc.lo < kLLMin || acc.hi > kLLMax) return std::nullopt;
    return Bounds{static_cast<long long>(acc.lo), static_cast<long long>(acc.hi)};
}

ModelResponse OracleBackend::sample(const ModelRequest& req) {
    if (req.sample_count < 1) throw GatewayError("sample_count must be >= 1");
    if (req.messages.empty()) throw GatewayError("messages must be nonempty");
    ModelResponse resp;
    resp.backend_id = "oracle";
    std::string answer = answer_one(req);
    resp.samples.assign(static_cast<size_t>(req.sample_count), answer);
    return resp;
}

std::string OracleBackend::answer_one(const ModelRequest& req) const {
    const std::string& prompt = req.messages.back().text;
    if (prompt.find(prompt::kImplementation) != std::string::npos) return answer_summarize(prompt);
    if (prompt.find(prompt::kCurrentDiagnostics) != std::string::npos)
        return answer_correction(prompt);
    if (prompt.find(prompt::kFixTask) != std::string::npos) return answer_fix(prompt);
    if (prompt.find(prompt::kDecisionQuestion) != std::string::npos)
        return answer_decision(prompt);
    throw GatewayError("oracle backend cannot interpret this prompt");
}

std::string OracleBackend::answer_summarize(const std::string& prompt) const {
    auto sig_block = prompt::extract_block(prompt, prompt::kSignature);
    auto body_block = prompt::extract_block(prompt, prompt::kImplementation);
    if (!sig_block || !body_block) throw GatewayError("summarize prompt missing blocks");
    std::string signature = trim(*sig_block);
    auto bounds = analyze_return_range(signature, *body_block);
    if (!bounds) {
        return "The return value depends on the inputs and may span the full range of the "
               "declared return type.";
    }
    return "The function always returns a value between " + std::to_string(bounds->min) +
           " and " + std::to_string(bounds->max) + ".";
}

namespace {

// "conversion: 'long long' to 'int'"
std::optional<std::pair<std::string, std::string>> parse_conversion_field(
    const std::string& block) {
    auto field = prompt::block_field(block, "conversion");
    if (!field) return std::nullopt;
    static const std::regex re(R"('([^']+)'\s+to\s+'([^']+)')");
    std::smatch m;
    if (!std::regex_search(*field, m, re)) return std::nullopt;
    return std::make_pair(m[1].str(), m[2].str());
}

std::optional<Bounds> parse_analysis_bounds(const std::string& prompt) {
    auto block = prompt::extract_block(prompt, prompt::kAnalysis);
    if (!block) return std::nullopt;
    static const std::regex re(R"(between\s+(-?\d+)\s+and\s+(-?\d+))");
    std::smatch m;
    if (!std::regex_search(*block, m, re)) return std::nullopt;
    long long a = std::stoll(m[1]), b = std::stoll(m[2]);
    if (a > b) std::swap(a, b);
    return Bounds{a, b};
}

}  // namespace

std::string OracleBackend::answer_decision(const std::string& prompt) const {
    auto type_block = prompt::extract_block(prompt, prompt::kTypeInformation);
    if (!type_block) throw GatewayError("decision prompt missing type information");
    auto conv = parse_conversion_field(*type_block);
    if (!conv) throw GatewayError("decision prompt missing conversion field");
    OracleVerdict v = oracle_decide(conv->first, conv->second, parse_analysis_bounds(prompt), table_);
    return render_decision_ballot(v.needs_check);
}

namespace {

struct RewriteResult {
    std::string diff;
};

// Shared fix-rewrite rules. Returns a git-diff-like answer patching `warning_text`
// (and, for the auto rewrite, a declaration line found in `code_block`).
std::optional<std::string> rewrite_for_fix(const std::string& code_block,
                                           const std::string& warning_text,
                                           const std::string& target_type, bool needs_check) {
    std::string line = warning_text;  // verbatim, leading whitespace included
    static const std::regex assign_re(R"(^(\s*)(.*?)\s*=\s*(.+?);(\s*(//.*)?)$)");
    static const std::regex return_re(R"(^(\s*)return\s+(.+?);(\s*(//.*)?)$)");

    std::smatch m;
    if (needs_check) {
        std::string wrapped;
        if (std::regex_match(line, m, assign_re)) {
            wrapped = m[1].str() + m[2].str() + " = safecast::safe_int_cast<" + target_type +
                      ">(" + m[3].str() + ");";
        } else if (std::regex_match(line, m, return_re)) {
            wrapped = m[1].str() + "return safecast::safe_int_cast<" + target_type + ">(" +
                      m[2].str() + ");";
        } else {
            return std::nullopt;
        }
        return "- " + line + "\n+ " + wrapped + "\n";
    }

    // no check needed: prefer a type change via `auto` when the value comes from a
    // plain call, otherwise a static_cast
    if (std::regex_match(line, m, assign_re)) {
        std::string lhs = m[2].str();
        std::string rhs = m[3].str();
        static const std::regex bare_ident_re(R"(^\w+$)");
        static const std::regex bare_call_re(R"(^\w+\s*\(\s*\)$)");
        static const std::regex decl_re(R"(^((?:\w+(?:\s+\w+)*)\s+)(\w+)$)");

        if (std::regex_match(rhs, bare_ident_re)) {
            // rewrite the rhs identifier's own declaration to `auto` when it was
            // declared from a bare call (the type-inference option)
            std::smatch dm;
            static const std::string ws = "[ \t]*";
            std::regex rhs_decl_re("^([ \t]*)((?:\\w+ +)+)(" + rhs + ") *= *(\\w+ *\\( *\\) *;.*)$");
            for (const std::string& code_line : split_lines(code_block)) {
                if (std::regex_match(code_line, dm, rhs_decl_re)) {
                    std::string rewritten = dm[1].str() + "auto " + dm[3].str() + " = " +
                                            trim(dm[4].str());
                    return "- " + code_line + "\n+ " + rewritten + "\n";
                }
            }
        }
        if (std::regex_match(rhs, bare_call_re)) {
            std::smatch dm;
            if (std::regex_match(lhs, dm, decl_re)) {
                std::string rewritten = m[1].str() + "auto " + dm[2].str() + " = " + rhs + ";";
                return "- " + line + "\n+ " + rewritten + "\n";
            }
        }
        std::string wrapped = m[1].str() + lhs + " = static_cast<" + target_type + ">(" + rhs +
                              ");";
        return "- " + line + "\n+ " + wrapped + "\n";
    }
    if (std::regex_match(line, m, return_re)) {
        std::string wrapped =
            m[1].str() + "return static_cast<" + target_type + ">(" + m[2].str() + ");";
        return "- " + line + "\n+ " + wrapped + "\n";
    }
    return std::nullopt;
}

}  // namespace

std::string OracleBackend::answer_fix(const std::string& prompt) const {
    auto task = prompt::extract_block(prompt, prompt::kFixTask);
    auto code = prompt::extract_block(prompt, prompt::kCode);
    if (!task || !code) throw GatewayError("fix prompt missing blocks");
    auto text = prompt::block_field(*task, "warning_text");
    auto conv = parse_conversion_field(*task);
    auto decision = prompt::block_field(*task, "decision");
    if (!text || !conv || !decision) throw GatewayError("fix prompt missing fields");
    bool needs_check = *decision == prompt::kMarkerNeeded;
    auto diff = rewrite_for_fix(*code, *text, conv->second, needs_check);
    if (!diff) throw GatewayError("oracle fix rules do not cover: " + *text);
    return *diff;
}

std::string OracleBackend::answer_correction(const std::string& prompt) const {
    auto diags = prompt::extract_block(prompt, prompt::kCurrentDiagnostics);
    auto code = prompt::extract_block(prompt, prompt::kCode);
    if (!diags || !code) throw GatewayError("correction prompt missing blocks");
    auto decision = prompt::block_field(*diags, "decision");
    bool needs_check = decision && *decision == prompt::kMarkerNeeded;

    // first data-loss entry: "line_text" + conversion parsed from the message line
    std::vector<std::string> lines = split_lines(*diags);
    static const std::regex msg_re(R"(implicit conversion[^']*'([^']+)'[^']*'([^']+)')");
    for (size_t i = 0; i < lines.size(); ++i) {
        std::smatch m;
        std::string l = lines[i];
        if (!std::regex_search(l, m, msg_re)) continue;
        for (size_t j = i + 1; j < lines.size(); ++j) {
            std::string t = trim(lines[j]);
            if (t.rfind("line_text:", 0) == 0) {
                std::string text = t.substr(strlen("line_text:"));
                if (!text.empty() && text.front() == ' ') text.erase(0, 1);
                auto diff = rewrite_for_fix(*code, text, m[2].str(), needs_check);
                if (diff) return *diff;
            }
            if (std::regex_search(t, m, msg_re)) break;
        }
    }
    throw GatewayError("oracle correction rules found no actionable diagnostic");
}

// ---------------------------------------------------------------------------
// RecordingGateway

RecordingGateway::RecordingGateway(ModelGateway& inner, std::string transcript_path)
    : inner_(inner), path_(std::move(transcript_path)) {
    std::ofstream out(path_, std::ios::trunc);  // start a fresh transcript
}

RecordingGateway::~RecordingGateway() = default;

ModelResponse RecordingGateway::sample(const ModelRequest& req) {
    ModelResponse resp = inner_.sample(req);
    ordered_json j;
    j["match"] = {{"digest", fnv1a_hex(canonical_request_text(req))}};
    j["samples"] = resp.samples;
    std::lock_guard<std::mutex> lock(mu_);
    std::ofstream out(path_, std::ios::app);
    out << j.dump() << "\n";
    return resp;
}

}  // namespace warnfix
