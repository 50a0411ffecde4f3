#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace warnfix {

struct ChatMessage {
    enum class Role { Human, Assistant };
    Role role;
    std::string text;
};

struct ModelRequest {
    std::string system;
    std::vector<ChatMessage> messages;  // nonempty
    double temperature = 0.7;           // [0, 2]
    int sample_count = 1;               // >= 1
};

struct TokenUsage {
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
};

struct ModelResponse {
    std::vector<std::string> samples;  // length == request.sample_count
    std::string backend_id;
    std::optional<TokenUsage> usage;
};

struct GatewayError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Response arrived but does not carry the expected shape (missing/short choices).
struct SchemaError : GatewayError {
    using GatewayError::GatewayError;
};

class ModelGateway {
public:
    virtual ~ModelGateway() = default;
    virtual ModelResponse sample(const ModelRequest& req) = 0;
};

// ---------------------------------------------------------------------------
// Integer layout table (LP64 defaults; the deployment platform is configurable).

struct IntLayout {
    int bits = 32;
    bool is_signed = true;
};

class TypeTable {
public:
    static TypeTable lp64();

    std::optional<IntLayout> lookup(const std::string& type_name) const;

    // Representable range of an integer layout.
    static __int128 min_of(IntLayout l);
    static __int128 max_of(IntLayout l);

    void set(const std::string& name, IntLayout layout) { table_[normalize(name)] = layout; }

    static std::string normalize(const std::string& type_name);

private:
    std::map<std::string, IntLayout> table_;
};

// Human-readable layout blurb, e.g. "64-bit signed integer".
std::string layout_description(IntLayout l);

// ---------------------------------------------------------------------------
// Rule-based range-check verdict (desk-scale ground truth).

struct Bounds {
    long long min = 0;
    long long max = 0;
};

enum class OracleReason { SourceRangeFits, TargetCannotHold, Unknown };

struct OracleVerdict {
    bool needs_check = true;
    OracleReason reason = OracleReason::Unknown;
    std::optional<Bounds> computed_bounds;
};

// needs_check = false iff the known value range (bounds when present, else the
// source type's full range) is representable in the target type. Unknown type
// names yield reason=Unknown, needs_check=true.
OracleVerdict oracle_decide(const std::string& source_type, const std::string& target_type,
                            const std::optional<Bounds>& bounds, const TypeTable& table);

const char* oracle_reason_name(OracleReason r);

// ---------------------------------------------------------------------------
// Backends.

// Deterministic scripted mock. Three construction modes:
//  * scripted(samples): a flat queue consumed sample_count at a time;
//  * from_transcript(path/entries): request-matcher -> sample list (JSON lines,
//    format documented in the README);
//  * noisy_decisions(truths, p, seed): per request ordinal k, emits decision
//    ballots that match truths[k % truths.size()] with probability p. Seeded
//    branching per request id keeps runs reproducible under concurrency.
class MockBackend : public ModelGateway {
public:
    struct TranscriptEntry {
        std::vector<std::string> match_contains;  // all substrings must appear
        std::optional<std::string> match_digest;  // fnv1a hex of the canonical request
        std::vector<std::string> samples;
        bool once = false;
        mutable bool used = false;
    };

    static MockBackend scripted(std::vector<std::string> samples);
    static MockBackend from_transcript(std::vector<TranscriptEntry> entries);
    static MockBackend from_transcript_file(const std::string& path);
    static MockBackend noisy_decisions(std::vector<bool> truth_needs_check, double p,
                                       uint64_t seed);

    ModelResponse sample(const ModelRequest& req) override;

private:
    MockBackend() = default;

    enum class Mode { Scripted, Transcript, Noisy } mode_ = Mode::Scripted;
    std::vector<std::string> script_;
    size_t script_pos_ = 0;
    std::vector<TranscriptEntry> entries_;
    std::vector<bool> truths_;
    double accuracy_ = 1.0;
    uint64_t seed_ = 0;
    uint64_t next_ordinal_ = 0;
    std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
};

// Canonical serialization used for transcript digests and prompt hashes.
std::string canonical_request_text(const ModelRequest& req);

// Ballot texts the deterministic backends emit.
std::string render_decision_ballot(bool needs_check);

// Rule-based oracle backend: parses the pipeline's own prompt shapes and answers
// deterministically (range summaries via interval arithmetic over simple function
// bodies, decisions via oracle_decide, fixes via line-rewrite rules).
class OracleBackend : public ModelGateway {
public:
    explicit OracleBackend(TypeTable table = TypeTable::lp64());
    ModelResponse sample(const ModelRequest& req) override;

    // Exposed for tests: interval analysis of a function body given its signature.
    // Returns nullopt when the body is outside the recognized forms.
    std::optional<Bounds> analyze_return_range(const std::string& signature,
                                               const std::string& body) const;

private:
    std::string answer_one(const ModelRequest& req) const;
    std::string answer_summarize(const std::string& prompt) const;
    std::string answer_decision(const std::string& prompt) const;
    std::string answer_fix(const std::string& prompt) const;
    std::string answer_correction(const std::string& prompt) const;

    TypeTable table_;
};

// Remote HTTP chat-completion backend (OpenAI-compatible shape: model, messages,
// temperature, n). Retries transport failures and 5xx with exponential backoff.
class HttpBackend : public ModelGateway {
public:
    struct Options {
        std::string base_url = "http://localhost:8080";
        std::string path = "/v1/chat/completions";
        std::string model = "default";
        std::string api_token_env = "WARNFIX_API_TOKEN";
        int max_attempts = 3;
        int initial_backoff_ms = 250;
    };

    explicit HttpBackend(Options opts);
    ModelResponse sample(const ModelRequest& req) override;

private:
    Options opts_;
};

// Tees every request/response pair into a transcript file (the MockBackend
// format), so a recorded run can be replayed hermetically.
class RecordingGateway : public ModelGateway {
public:
    RecordingGateway(ModelGateway& inner, std::string transcript_path);
    ~RecordingGateway();
    ModelResponse sample(const ModelRequest& req) override;

private:
    ModelGateway& inner_;
    std::string path_;
    std::string buffer_;
    std::mutex mu_;
};

}  // namespace warnfix
