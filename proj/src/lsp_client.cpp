#include "warnfix/lsp_client.hpp"

#include <chrono>

namespace warnfix::lsp {

using nlohmann::json;
using namespace std::chrono;

std::string uri_from_path(const std::string& path) {
    std::string out = "file://";
    for (char c : path) {
        if (std::isalnum(static_cast<unsigned char>(c)) || strchr("/._-~", c)) {
            out.push_back(c);
        } else {
            char buf[4];
            std::snprintf(buf, sizeof(buf), "%%%02X", static_cast<unsigned char>(c));
            out += buf;
        }
    }
    return out;
}

std::string path_from_uri(const std::string& uri) {
    std::string s = uri;
    if (s.rfind("file://", 0) == 0) s = s.substr(7);
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            out.push_back(static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16)));
            i += 2;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

LspSession::LspSession(std::unique_ptr<Transport> transport, Options opts)
    : transport_(std::move(transport)), opts_(std::move(opts)) {
    reader_ = std::thread([this] { reader_loop(); });
}

LspSession::~LspSession() {
    try {
        shutdown();
    } catch (...) {
    }
    {
        std::lock_guard<std::mutex> lock(mu_);
        stop_ = true;
    }
    transport_->close();
    if (reader_.joinable()) reader_.join();
}

void LspSession::reader_loop() {
    for (;;) {
        {
            std::lock_guard<std::mutex> lock(mu_);
            if (stop_) return;
        }
        std::string body;
        try {
            if (!transport_->receive(body, 100)) continue;
        } catch (const TransportClosed& e) {
            std::lock_guard<std::mutex> lock(mu_);
            if (!stop_) {
                dead_ = true;
                death_reason_ = e.what();
            }
            fail_all_pending(e.what());
            cv_.notify_all();
            return;
        }
        json msg;
        try {
            msg = json::parse(body);
        } catch (const json::parse_error&) {
            continue;  // not ours to crash on
        }

        std::lock_guard<std::mutex> lock(mu_);
        if (msg.contains("id") && !msg.contains("method")) {
            long long id = msg["id"].is_number() ? msg["id"].get<long long>() : -1;
            auto it = pending_.find(id);
            if (it != pending_.end()) {
                auto p = it->second;
                if (msg.contains("error")) {
                    p->is_error = true;
                    p->error_text = msg["error"].dump();
                } else {
                    p->result = msg.value("result", json());
                }
                p->done = true;
                pending_.erase(it);
                cv_.notify_all();
            }
            continue;
        }
        std::string method = msg.value("method", "");
        if (method == "textDocument/publishDiagnostics") {
            const json& params = msg.value("params", json::object());
            std::string file = path_from_uri(params.value("uri", ""));
            DocState& doc = docs_[file];
            doc.last_diagnostics = diagnostics_from_lsp(file, params);
            doc.publish_seq++;
            doc.last_publish = steady_clock::now();
            if (params.contains("version") && params["version"].is_number()) {
                doc.published_version = params["version"].get<int>();
            }
            cv_.notify_all();
        }
        // server->client requests (none supported) and other notifications are ignored
    }
}

void LspSession::fail_all_pending(const std::string& why) {
    for (auto& [id, p] : pending_) {
        p->is_error = true;
        p->error_text = why;
        p->done = true;
    }
    pending_.clear();
}

json LspSession::request(const std::string& method, json params) {
    long long id;
    auto pending = std::make_shared<Pending>();
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (dead_) throw LspError(LspErrorKind::Crashed, "language server down: " + death_reason_);
        id = next_id_++;
        pending_[id] = pending;
    }
    json msg = {{"jsonrpc", "2.0"}, {"id", id}, {"method", method}, {"params", std::move(params)}};
    try {
        transport_->send(msg.dump());
    } catch (const TransportClosed& e) {
        std::lock_guard<std::mutex> lock(mu_);
        pending_.erase(id);
        dead_ = true;
        death_reason_ = e.what();
        throw LspError(LspErrorKind::Crashed, e.what());
    }

    std::unique_lock<std::mutex> lock(mu_);
    bool ok = cv_.wait_for(lock, milliseconds(opts_.request_timeout_ms),
                           [&] { return pending->done; });
    if (!ok) {
        pending_.erase(id);
        throw LspError(LspErrorKind::Timeout, method + " timed out");
    }
    if (pending->is_error) {
        if (dead_) throw LspError(LspErrorKind::Crashed, pending->error_text);
        throw LspError(LspErrorKind::ServerError, method + " failed: " + pending->error_text);
    }
    return pending->result;
}

void LspSession::notify(const std::string& method, json params) {
    json msg = {{"jsonrpc", "2.0"}, {"method", method}, {"params", std::move(params)}};
    try {
        transport_->send(msg.dump());
    } catch (const TransportClosed& e) {
        std::lock_guard<std::mutex> lock(mu_);
        dead_ = true;
        death_reason_ = e.what();
        throw LspError(LspErrorKind::Crashed, e.what());
    }
}

void LspSession::initialize() {
    json params = {
        {"processId", nullptr},
        {"rootUri", opts_.root_path.empty() ? json() : json(uri_from_path(opts_.root_path))},
        {"capabilities",
         {{"textDocument",
           {{"publishDiagnostics", {{"versionSupport", true}}},
            {"hover", {{"contentFormat", {"plaintext", "markdown"}}}}}}}},
    };
    request("initialize", std::move(params));
    notify("initialized", json::object());
    initialized_ = true;
}

void LspSession::shutdown() {
    bool was_initialized;
    {
        std::lock_guard<std::mutex> lock(mu_);
        was_initialized = initialized_ && !dead_;
        initialized_ = false;
    }
    if (!was_initialized) return;
    try {
        request("shutdown", json());
        notify("exit", json());
    } catch (const LspError&) {
        // server already gone; nothing to clean up
    }
}

void LspSession::open_document(const std::string& file, const std::string& content) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        DocState& doc = docs_[file];
        doc.text = content;
        doc.version = 1;
    }
    notify("textDocument/didOpen",
           {{"textDocument",
             {{"uri", uri_from_path(file)},
              {"languageId", "cpp"},
              {"version", 1},
              {"text", content}}}});
}

bool LspSession::has_document(const std::string& file) const {
    return docs_.count(file) > 0;
}

const std::string& LspSession::document_text(const std::string& file) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = docs_.find(file);
    if (it == docs_.end()) throw LspError(LspErrorKind::ServerError, "document not open: " + file);
    return it->second.text;
}

void LspSession::change_document(const std::string& file, const std::string& content) {
    int version;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = docs_.find(file);
        if (it == docs_.end())
            throw LspError(LspErrorKind::ServerError, "document not open: " + file);
        it->second.text = content;
        version = ++it->second.version;
    }
    notify("textDocument/didChange",
           {{"textDocument", {{"uri", uri_from_path(file)}, {"version", version}}},
            {"contentChanges", json::array({{{"text", content}}})}});
}

DefinitionResult LspSession::definition(const std::string& file, Position pos) {
    json result = request("textDocument/definition",
                          {{"textDocument", {{"uri", uri_from_path(file)}}},
                           {"position", {{"line", pos.line}, {"character", pos.character}}}});
    DefinitionResult out;
    auto read_loc = [&out](const json& loc) {
        if (!loc.contains("uri") || !loc.contains("range")) return;
        DefinitionLocation d;
        d.file = path_from_uri(loc["uri"].get<std::string>());
        const json& r = loc["range"];
        d.range.start = {r["start"].value("line", 0), r["start"].value("character", 0)};
        d.range.end = {r["end"].value("line", 0), r["end"].value("character", 0)};
        out.locations.push_back(std::move(d));
    };
    if (result.is_array()) {
        for (const auto& loc : result) read_loc(loc);
    } else if (result.is_object()) {
        read_loc(result);
    }
    return out;
}

HoverResult LspSession::hover(const std::string& file, Position pos) {
    json result = request("textDocument/hover",
                          {{"textDocument", {{"uri", uri_from_path(file)}}},
                           {"position", {{"line", pos.line}, {"character", pos.character}}}});
    HoverResult out;
    if (result.is_null()) return out;
    const json& contents = result.value("contents", json());
    if (contents.is_string()) {
        out.summary = contents.get<std::string>();
    } else if (contents.is_object()) {
        out.summary = contents.value("value", "");
    } else if (contents.is_array()) {
        for (const auto& part : contents) {
            if (!out.summary.empty()) out.summary += "\n";
            if (part.is_string()) out.summary += part.get<std::string>();
            else if (part.is_object()) out.summary += part.value("value", "");
        }
    }
    out.available = !out.summary.empty();
    return out;
}

std::vector<Diagnostic> LspSession::fresh_diagnostics(const std::string& file) {
    return fresh_diagnostics(file, opts_.quiescence_ms, opts_.diagnostics_deadline_ms);
}

std::vector<Diagnostic> LspSession::fresh_diagnostics(const std::string& file, int quiescence_ms,
                                                      int deadline_ms) {
    auto deadline = steady_clock::now() + milliseconds(deadline_ms);
    std::unique_lock<std::mutex> lock(mu_);
    auto it = docs_.find(file);
    if (it == docs_.end()) throw LspError(LspErrorKind::ServerError, "document not open: " + file);
    int want_version = it->second.version;

    // wait for a publish at (or past) the current document version
    for (;;) {
        DocState& doc = docs_[file];
        bool current = doc.publish_seq > 0 &&
                       (doc.published_version < 0 || doc.published_version >= want_version);
        if (current) break;
        if (dead_) throw LspError(LspErrorKind::Crashed, "language server down: " + death_reason_);
        if (cv_.wait_until(lock, deadline) == std::cv_status::timeout) {
            throw LspError(LspErrorKind::Timeout, "no diagnostics published for " + file);
        }
    }
    // then wait until the server has been quiet for the quiescence window
    for (;;) {
        DocState& doc = docs_[file];
        auto quiet_at = doc.last_publish + milliseconds(quiescence_ms);
        auto now = steady_clock::now();
        if (now >= quiet_at) return doc.last_diagnostics;
        if (now >= deadline) return doc.last_diagnostics;  // best snapshot we have
        long long seq = doc.publish_seq;
        cv_.wait_until(lock, std::min(quiet_at, deadline), [&] {
            return docs_[file].publish_seq != seq || dead_;
        });
        if (dead_) throw LspError(LspErrorKind::Crashed, "language server down: " + death_reason_);
    }
}

}  // namespace warnfix::lsp
