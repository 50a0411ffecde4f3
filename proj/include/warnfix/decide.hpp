#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "warnfix/context.hpp"
#include "warnfix/gateway.hpp"

namespace warnfix {

enum class BallotDecision { Needed, NotNeeded, Unparseable };

struct Ballot {
    std::string raw_text;
    BallotDecision decision = BallotDecision::Unparseable;
    std::string rationale_excerpt;
};

enum class Verdict { Needed, NotNeeded };

struct VoteCounts {
    int needed = 0;
    int not_needed = 0;
    int unparseable = 0;
};

struct RangeCheckDecision {
    Verdict verdict = Verdict::Needed;
    std::vector<Ballot> ballots;
    VoteCounts counts;
    int sample_count = 0;
    double temperature = 0.0;
    std::string prompt_hash;

    nlohmann::ordered_json to_json() const;
};

struct DecideConfig {
    int sample_count = 13;
    double temperature = 0.7;
};

// Four-block prompt (persona / code / type info / function analysis) followed by
// the four-step chain-of-thought instruction and the terminal-marker contract.
ModelRequest build_decision_prompt(const WarningContext& ctx, const DecideConfig& cfg);

Ballot parse_ballot(const std::string& raw);

// Verdict is Needed when needed >= not_needed (ties and all-unparseable ballots
// resolve conservatively to Needed). Fills ballots/counts/verdict only.
RangeCheckDecision majority_vote(const std::vector<Ballot>& ballots);

RangeCheckDecision decide(const WarningContext& ctx, ModelGateway& gateway,
                          const DecideConfig& cfg);

const char* verdict_name(Verdict v);
const char* ballot_decision_name(BallotDecision d);

}  // namespace warnfix
