#pragma once

#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "warnfix/diagnostics.hpp"
#include "warnfix/lsp_transport.hpp"

namespace warnfix::lsp {

struct DefinitionLocation {
    std::string file;
    Range range;
};

struct DefinitionResult {
    std::vector<DefinitionLocation> locations;  // empty allowed
};

struct HoverResult {
    std::string summary;
    bool available = false;
};

enum class LspErrorKind { Timeout, ServerError, Crashed };

struct LspError : std::runtime_error {
    LspErrorKind kind;
    LspError(LspErrorKind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

// Narrow facade the pipeline depends on; implemented by LspSession and by
// test fakes.
class LspFacade {
public:
    virtual ~LspFacade() = default;
    virtual const std::string& document_text(const std::string& file) = 0;
    virtual void change_document(const std::string& file, const std::string& content) = 0;
    virtual DefinitionResult definition(const std::string& file, Position pos) = 0;
    virtual HoverResult hover(const std::string& file, Position pos) = 0;
    virtual std::vector<Diagnostic> fresh_diagnostics(const std::string& file) = 0;
};

std::string uri_from_path(const std::string& path);
std::string path_from_uri(const std::string& uri);

// One session per workspace. All requests are serialized through a single
// writer; a reader thread demultiplexes responses by id and collects
// publishDiagnostics pushes. Safe to call from concurrent workers.
class LspSession : public LspFacade {
public:
    struct Options {
        std::string root_path;
        int request_timeout_ms = 30000;
        int quiescence_ms = 500;
        int diagnostics_deadline_ms = 30000;
    };

    LspSession(std::unique_ptr<Transport> transport, Options opts);
    ~LspSession() override;

    void initialize();
    void shutdown();  // polite shutdown/exit; also run by the destructor

    void open_document(const std::string& file, const std::string& content);
    bool has_document(const std::string& file) const;

    // LspFacade
    const std::string& document_text(const std::string& file) override;
    void change_document(const std::string& file, const std::string& content) override;
    DefinitionResult definition(const std::string& file, Position pos) override;
    HoverResult hover(const std::string& file, Position pos) override;
    std::vector<Diagnostic> fresh_diagnostics(const std::string& file) override;

    std::vector<Diagnostic> fresh_diagnostics(const std::string& file, int quiescence_ms,
                                              int deadline_ms);

    const Options& options() const { return opts_; }

private:
    nlohmann::json request(const std::string& method, nlohmann::json params);
    void notify(const std::string& method, nlohmann::json params);
    void reader_loop();
    void fail_all_pending(const std::string& why);

    std::unique_ptr<Transport> transport_;
    Options opts_;

    std::mutex mu_;
    std::condition_variable cv_;
    long long next_id_ = 1;

    struct Pending {
        bool done = false;
        nlohmann::json result;
        bool is_error = false;
        std::string error_text;
    };
    std::map<long long, std::shared_ptr<Pending>> pending_;

    struct DocState {
        std::string text;
        int version = 0;
        long long publish_seq = 0;        // bumped on every publish for this doc
        int published_version = -1;       // server-reported version, if any
        std::chrono::steady_clock::time_point last_publish{};
        std::vector<Diagnostic> last_diagnostics;
    };
    std::map<std::string, DocState> docs_;

    std::thread reader_;
    bool stop_ = false;
    bool dead_ = false;
    std::string death_reason_;
    bool initialized_ = false;
};

}  // namespace warnfix::lsp
