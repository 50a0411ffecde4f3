#include "warnfix/decide.hpp"

#include "warnfix/prompt_format.hpp"
#include "warnfix/util.hpp"

namespace warnfix {

using nlohmann::ordered_json;

namespace {

// "[Type Information]" body: one line per identifier with a known hover type,
// plus the conversion pair the compiler reported.
std::string type_information_block(const WarningContext& ctx) {
    std::string out;
    TypeTable table = TypeTable::lp64();
    std::set<std::string> listed;
    for (const auto& info : ctx.identifiers) {
        if (!info.hover.available) continue;
        if (!listed.insert(info.name).second) continue;
        std::string type = extract_type_from_hover(info.hover.summary, info.name);
        if (type.empty()) continue;
        out += info.name + ": " + type;
        if (auto layout = table.lookup(type)) {
            out += " (" + layout_description(*layout) + ")";
        }
        out += "\n";
    }
    out += "conversion: '" + ctx.source_type + "' to '" + ctx.target_type + "'\n";
    return out;
}

std::string analysis_block(const WarningContext& ctx) {
    std::string out;
    bool any = false;
    for (const auto& r : ctx.return_ranges) {
        if (!r.available) continue;
        out += r.function_signature + "\n";
        out += "Analysis: " + r.range_description + "\n";
        any = true;
    }
    if (!any) out = "Analysis: unavailable\n";
    return out;
}

}  // namespace

ModelRequest build_decision_prompt(const WarningContext& ctx, const DecideConfig& cfg) {
    ModelRequest req;
    req.system = prompt::kSystemPersona;
    req.temperature = cfg.temperature;
    req.sample_count = cfg.sample_count;

    std::string text;
    text += std::string(prompt::kCode) + "\n" + ctx.snippet.text;
    if (!ctx.snippet.text.empty() && ctx.snippet.text.back() != '\n') text += "\n";
    text += "\n";
    text += std::string(prompt::kTypeInformation) + "\n" + type_information_block(ctx) + "\n";
    text += std::string(prompt::kAnalysis) + "\n" + analysis_block(ctx) + "\n";
    text += std::string(prompt::kDecisionQuestion) + "\n\n";
    text += "Think step-by-step:\n";
    text += "1. Analyze types and value ranges\n";
    text += "2. Assess correctness concerns\n";
    text += "3. Evaluate performance implications\n";
    text += "4. Come up with an answer of the question with reasoning behind\n\n";
    text += "End your reply with exactly one final line, either\n";
    text += std::string("DECISION: ") + prompt::kMarkerNeeded + "\n";
    text += "or\n";
    text += std::string("DECISION: ") + prompt::kMarkerNotNeeded + "\n";

    req.messages.push_back({ChatMessage::Role::Human, std::move(text)});
    return req;
}

Ballot parse_ballot(const std::string& raw) {
    Ballot b;
    b.raw_text = raw;

    size_t needed_at = raw.rfind(prompt::kMarkerNeeded);
    size_t not_needed_at = raw.rfind(prompt::kMarkerNotNeeded);
    if (needed_at == std::string::npos && not_needed_at == std::string::npos) {
        b.decision = BallotDecision::Unparseable;
    } else if (needed_at == std::string::npos) {
        b.decision = BallotDecision::NotNeeded;
    } else if (not_needed_at == std::string::npos) {
        b.decision = BallotDecision::Needed;
    } else {
        b.decision = needed_at > not_needed_at ? BallotDecision::Needed
                                               : BallotDecision::NotNeeded;
    }

    size_t rec = raw.rfind("Recommendation");
    if (rec != std::string::npos) {
        size_t eol = raw.find('\n', rec);
        b.rationale_excerpt = trim(eol == std::string::npos ? "" : raw.substr(eol + 1));
    } else {
        std::vector<std::string> lines = split_lines(raw);
        size_t from = lines.size() > 3 ? lines.size() - 3 : 0;
        std::string tail;
        for (size_t i = from; i < lines.size(); ++i) {
            tail += lines[i];
            if (i + 1 < lines.size()) tail += '\n';
        }
        b.rationale_excerpt = tail;
    }
    return b;
}

RangeCheckDecision majority_vote(const std::vector<Ballot>& ballots) {
    RangeCheckDecision d;
    d.ballots = ballots;
    for (const Ballot& b : ballots) {
        switch (b.decision) {
            case BallotDecision::Needed: d.counts.needed++; break;
            case BallotDecision::NotNeeded: d.counts.not_needed++; break;
            case BallotDecision::Unparseable: d.counts.unparseable++; break;
        }
    }
    d.verdict = d.counts.needed >= d.counts.not_needed ? Verdict::Needed : Verdict::NotNeeded;
    d.sample_count = static_cast<int>(ballots.size());
    return d;
}

RangeCheckDecision decide(const WarningContext& ctx, ModelGateway& gateway,
                          const DecideConfig& cfg) {
    ModelRequest req = build_decision_prompt(ctx, cfg);
    ModelResponse resp = gateway.sample(req);

    std::vector<Ballot> ballots;
    ballots.reserve(resp.samples.size());
    for (const std::string& s : resp.samples) ballots.push_back(parse_ballot(s));

    RangeCheckDecision d = majority_vote(ballots);
    d.sample_count = cfg.sample_count;
    d.temperature = cfg.temperature;
    d.prompt_hash = fnv1a_hex(canonical_request_text(req));
    return d;
}

const char* verdict_name(Verdict v) {
    return v == Verdict::Needed ? "needed" : "not_needed";
}

const char* ballot_decision_name(BallotDecision d) {
    switch (d) {
        case BallotDecision::Needed: return "needed";
        case BallotDecision::NotNeeded: return "not_needed";
        case BallotDecision::Unparseable: return "unparseable";
    }
    return "unparseable";
}

ordered_json RangeCheckDecision::to_json() const {
    ordered_json j;
    j["verdict"] = verdict_name(verdict);
    j["counts"] = {{"needed", counts.needed},
                   {"not_needed", counts.not_needed},
                   {"unparseable", counts.unparseable}};
    j["sample_count"] = sample_count;
    j["temperature"] = temperature;
    j["prompt_hash"] = prompt_hash;
    j["ballots"] = ordered_json::array();
    for (const auto& b : ballots) {
        j["ballots"].push_back({{"decision", ballot_decision_name(b.decision)},
                                {"rationale_excerpt", b.rationale_excerpt},
                                {"raw_text", b.raw_text}});
    }
    return j;
}

}  // namespace warnfix
