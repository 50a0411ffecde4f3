#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace warnfix::lsp {

// Message-level transport: send/receive whole JSON-RPC bodies. Implementations
// own the framing. send() is atomic per message.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void send(const std::string& body) = 0;
    // Blocks up to timeout_ms for the next message body. Returns false on timeout.
    // Throws TransportClosed once the peer is gone and the buffer is drained.
    virtual bool receive(std::string& body, int timeout_ms) = 0;
    virtual void close() = 0;
};

struct TransportClosed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Child process speaking LSP over stdio.
class ChildProcessTransport : public Transport {
public:
    ChildProcessTransport(std::vector<std::string> argv, std::string working_dir = "");
    ~ChildProcessTransport() override;

    void send(const std::string& body) override;
    bool receive(std::string& body, int timeout_ms) override;
    void close() override;

    bool alive() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One recorded wire event. "client" events are messages our side sent.
struct SessionEvent {
    enum class Dir { Client, Server };
    Dir dir;
    std::string body;
};

std::vector<SessionEvent> load_session(const std::string& path);
void save_session(const std::string& path, const std::vector<SessionEvent>& events);

// Replays a recorded session: each send() must match the next recorded client
// event (by method and id kind); the server events that follow it become
// available to receive().
class ReplayTransport : public Transport {
public:
    explicit ReplayTransport(std::vector<SessionEvent> events);

    void send(const std::string& body) override;
    bool receive(std::string& body, int timeout_ms) override;
    void close() override;

private:
    std::vector<SessionEvent> events_;
    size_t cursor_ = 0;        // next unconsumed event
    std::vector<std::string> inbox_;
    size_t inbox_pos_ = 0;
    std::mutex mu_;
    bool closed_ = false;

    void enqueue_server_events_locked();
};

// Tees both directions of an inner transport into an event log.
class RecordingTransport : public Transport {
public:
    RecordingTransport(std::unique_ptr<Transport> inner, std::string out_path);
    ~RecordingTransport() override;

    void send(const std::string& body) override;
    bool receive(std::string& body, int timeout_ms) override;
    void close() override;

private:
    std::unique_ptr<Transport> inner_;
    std::string out_path_;
    std::vector<SessionEvent> events_;
    std::mutex mu_;
    bool saved_ = false;
    void save_locked();
};

}  // namespace warnfix::lsp
