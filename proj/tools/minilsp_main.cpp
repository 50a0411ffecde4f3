// warnfix-minilsp: a minimal C/C++ narrowing-analysis language server speaking
// LSP over stdio. It exists so the repair pipeline and its tests run without an
// external clangd; point --server-cmd at clangd for real projects.

#include <unistd.h>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "json.hpp"

#include "warnfix/lsp_client.hpp"
#include "warnfix/lsp_framing.hpp"
#include "warnfix/minicheck.hpp"

using json = nlohmann::json;
using namespace warnfix;

namespace {

struct Server {
    std::map<std::string, std::pair<std::string, int>> docs;  // uri -> (text, version)
    bool shutdown_requested = false;
    int exit_after_requests = -1;  // test hook: simulate a crash
    int requests_served = 0;

    void write_message(const json& msg) {
        std::string framed = lsp::frame(msg.dump());
        std::fwrite(framed.data(), 1, framed.size(), stdout);
        std::fflush(stdout);
    }

    void respond(const json& id, json result) {
        write_message({{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}});
    }

    void respond_error(const json& id, int code, const std::string& message) {
        write_message({{"jsonrpc", "2.0"},
                       {"id", id},
                       {"error", {{"code", code}, {"message", message}}}});
    }

    void publish_diagnostics(const std::string& uri) {
        const auto& [text, version] = docs[uri];
        minicheck::FileAnalysis fa = minicheck::analyze(lsp::path_from_uri(uri), text);
        json diags = json::array();
        for (const Diagnostic& d : fa.diagnostics) {
            json jd;
            jd["range"] = {{"start", {{"line", d.range.start.line},
                                      {"character", d.range.start.character}}},
                           {"end", {{"line", d.range.end.line},
                                    {"character", d.range.end.character}}}};
            jd["severity"] = d.severity == Severity::Error ? 1 : 2;
            jd["code"] = d.code;
            jd["source"] = "warnfix-minilsp";
            jd["message"] = d.message;
            diags.push_back(std::move(jd));
        }
        write_message({{"jsonrpc", "2.0"},
                       {"method", "textDocument/publishDiagnostics"},
                       {"params",
                        {{"uri", uri}, {"version", version}, {"diagnostics", std::move(diags)}}}});
    }

    // returns false when the server should exit
    bool handle(const json& msg) {
        std::string method = msg.value("method", "");
        bool is_request = msg.contains("id") && !method.empty();

        if (is_request && exit_after_requests >= 0 &&
            ++requests_served > exit_after_requests) {
            return false;  // simulated crash: vanish without a reply
        }

        if (method == "initialize") {
            respond(msg["id"],
                    {{"capabilities",
                      {{"textDocumentSync", 1},
                       {"hoverProvider", true},
                       {"definitionProvider", true}}},
                     {"serverInfo", {{"name", "warnfix-minilsp"}, {"version", "1.0"}}}});
            return true;
        }
        if (method == "shutdown") {
            shutdown_requested = true;
            respond(msg["id"], nullptr);
            return true;
        }
        if (method == "exit") return false;
        if (method == "initialized" || method == "$/cancelRequest") return true;

        if (method == "textDocument/didOpen") {
            const json& td = msg["params"]["textDocument"];
            std::string uri = td["uri"];
            docs[uri] = {td.value("text", ""), td.value("version", 1)};
            publish_diagnostics(uri);
            return true;
        }
        if (method == "textDocument/didChange") {
            const json& params = msg["params"];
            std::string uri = params["textDocument"]["uri"];
            int version = params["textDocument"].value("version", 0);
            const json& changes = params["contentChanges"];
            if (!changes.empty()) {
                // full-sync server: the last change carries the whole buffer
                docs[uri] = {changes.back().value("text", ""), version};
                publish_diagnostics(uri);
            }
            return true;
        }
        if (method == "textDocument/hover") {
            const json& params = msg["params"];
            std::string uri = params["textDocument"]["uri"];
            Position pos{params["position"].value("line", 0),
                         params["position"].value("character", 0)};
            auto it = docs.find(uri);
            if (it == docs.end()) {
                respond(msg["id"], nullptr);
                return true;
            }
            lsp::HoverResult h = minicheck::hover_at(it->second.first, pos);
            if (!h.available) {
                respond(msg["id"], nullptr);
            } else {
                respond(msg["id"],
                        {{"contents", {{"kind", "plaintext"}, {"value", h.summary}}}});
            }
            return true;
        }
        if (method == "textDocument/definition") {
            const json& params = msg["params"];
            std::string uri = params["textDocument"]["uri"];
            Position pos{params["position"].value("line", 0),
                         params["position"].value("character", 0)};
            auto it = docs.find(uri);
            if (it == docs.end()) {
                respond(msg["id"], json::array());
                return true;
            }
            auto loc = minicheck::definition_at(lsp::path_from_uri(uri), it->second.first, pos);
            if (!loc) {
                respond(msg["id"], json::array());
                return true;
            }
            json jloc = {{"uri", lsp::uri_from_path(loc->file)},
                         {"range",
                          {{"start", {{"line", loc->range.start.line},
                                      {"character", loc->range.start.character}}},
                           {"end", {{"line", loc->range.end.line},
                                    {"character", loc->range.end.character}}}}}};
            respond(msg["id"], json::array({jloc}));
            return true;
        }

        if (is_request) respond_error(msg["id"], -32601, "method not found: " + method);
        return true;
    }
};

}  // namespace

int main(int argc, char** argv) {
    Server server;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--exit-after-requests" && i + 1 < argc) {
            server.exit_after_requests = std::atoi(argv[++i]);
        }
    }

    lsp::FrameDecoder decoder;
    char buf[65536];
    for (;;) {
        if (auto body = decoder.next()) {
            json msg;
            try {
                msg = json::parse(*body);
            } catch (const json::parse_error&) {
                continue;
            }
            if (!server.handle(msg)) break;
            continue;
        }
        ssize_t n = ::read(STDIN_FILENO, buf, sizeof(buf));
        if (n <= 0) break;
        decoder.feed({buf, static_cast<size_t>(n)});
    }
    return 0;
}
