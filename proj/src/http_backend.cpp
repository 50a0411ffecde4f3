#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "warnfix/gateway.hpp"

namespace warnfix {

using nlohmann::json;

HttpBackend::HttpBackend(Options opts) : opts_(std::move(opts)) {}

ModelResponse HttpBackend::sample(const ModelRequest& req) {
    if (req.sample_count < 1) throw GatewayError("sample_count must be >= 1");
    if (req.messages.empty()) throw GatewayError("messages must be nonempty");

    json body;
    body["model"] = opts_.model;
    json messages = json::array();
    if (!req.system.empty()) messages.push_back({{"role", "system"}, {"content", req.system}});
    for (const auto& m : req.messages) {
        messages.push_back({{"role", m.role == ChatMessage::Role::Human ? "user" : "assistant"},
                            {"content", m.text}});
    }
    body["messages"] = std::move(messages);
    body["temperature"] = req.temperature;
    body["n"] = req.sample_count;
    const std::string payload = body.dump();

    httplib::Client client(opts_.base_url);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (const char* token = std::getenv(opts_.api_token_env.c_str()); token && *token) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    int backoff = opts_.initial_backoff_ms;
    std::string last_error;
    for (int attempt = 1; attempt <= opts_.max_attempts; ++attempt) {
        auto res = client.Post(opts_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
        } else if (res->status >= 500) {
            last_error = "server error: HTTP " + std::to_string(res->status);
        } else if (res->status != 200) {
            throw GatewayError("chat endpoint returned HTTP " + std::to_string(res->status) +
                               ": " + res->body);
        } else {
            json parsed;
            try {
                parsed = json::parse(res->body);
            } catch (const json::parse_error& e) {
                throw SchemaError(std::string("chat response is not JSON: ") + e.what());
            }
            if (!parsed.contains("choices") || !parsed["choices"].is_array()) {
                throw SchemaError("chat response missing choices");
            }
            ModelResponse out;
            out.backend_id = "http:" + opts_.model;
            for (const auto& choice : parsed["choices"]) {
                out.samples.push_back(choice.value("message", json::object()).value("content", ""));
            }
            if (out.samples.size() != static_cast<size_t>(req.sample_count)) {
                throw SchemaError("chat response has " + std::to_string(out.samples.size()) +
                                  " choices, expected " + std::to_string(req.sample_count));
            }
            if (parsed.contains("usage")) {
                TokenUsage usage;
                usage.prompt_tokens = parsed["usage"].value("prompt_tokens", 0LL);
                usage.completion_tokens = parsed["usage"].value("completion_tokens", 0LL);
                out.usage = usage;
            }
            return out;
        }
        if (attempt < opts_.max_attempts) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
    }
    throw GatewayError("chat endpoint unreachable after " + std::to_string(opts_.max_attempts) +
                       " attempts: " + last_error);
}

}  // namespace warnfix
