#include "warnfix/lsp_transport.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "warnfix/lsp_framing.hpp"
#include "warnfix/util.hpp"

namespace warnfix::lsp {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// ChildProcessTransport

struct ChildProcessTransport::Impl {
    pid_t pid = -1;
    int to_child = -1;    // we write
    int from_child = -1;  // we read
    FrameDecoder decoder;
    std::mutex write_mu;
    std::mutex read_mu;
    bool eof = false;
};

ChildProcessTransport::ChildProcessTransport(std::vector<std::string> argv,
                                             std::string working_dir)
    : impl_(std::make_unique<Impl>()) {
    if (argv.empty()) throw TransportClosed("empty server command");

    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) throw TransportClosed("pipe() failed");

    pid_t pid = fork();
    if (pid < 0) throw TransportClosed("fork() failed");
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        if (!working_dir.empty() && chdir(working_dir.c_str()) != 0) _exit(127);
        std::vector<char*> cargv;
        for (auto& a : argv) cargv.push_back(a.data());
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        _exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    impl_->pid = pid;
    impl_->to_child = in_pipe[1];
    impl_->from_child = out_pipe[0];
}

ChildProcessTransport::~ChildProcessTransport() { close(); }

void ChildProcessTransport::send(const std::string& body) {
    std::lock_guard<std::mutex> lock(impl_->write_mu);
    if (impl_->to_child < 0) throw TransportClosed("transport closed");
    std::string framed = frame(body);
    size_t off = 0;
    while (off < framed.size()) {
        ssize_t n = ::write(impl_->to_child, framed.data() + off, framed.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportClosed("write to language server failed");
        }
        off += static_cast<size_t>(n);
    }
}

bool ChildProcessTransport::receive(std::string& body, int timeout_ms) {
    std::lock_guard<std::mutex> lock(impl_->read_mu);
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
        if (auto msg = impl_->decoder.next()) {
            body = std::move(*msg);
            return true;
        }
        if (impl_->eof) throw TransportClosed("language server closed its pipe");
        if (impl_->from_child < 0) throw TransportClosed("transport closed");
        auto now = std::chrono::steady_clock::now();
        int remaining = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
        if (remaining <= 0) return false;

        pollfd pfd{impl_->from_child, POLLIN, 0};
        int rc = ::poll(&pfd, 1, remaining);
        if (rc == 0) return false;
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw TransportClosed("poll failed");
        }
        char buf[65536];
        ssize_t n = ::read(impl_->from_child, buf, sizeof(buf));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportClosed("read from language server failed");
        }
        if (n == 0) {
            impl_->eof = true;
            continue;
        }
        impl_->decoder.feed({buf, static_cast<size_t>(n)});
    }
}

void ChildProcessTransport::close() {
    if (impl_->to_child >= 0) {
        ::close(impl_->to_child);
        impl_->to_child = -1;
    }
    if (impl_->from_child >= 0) {
        ::close(impl_->from_child);
        impl_->from_child = -1;
    }
    if (impl_->pid > 0) {
        int status = 0;
        for (int i = 0; i < 50; ++i) {
            pid_t r = waitpid(impl_->pid, &status, WNOHANG);
            if (r == impl_->pid) {
                impl_->pid = -1;
                return;
            }
            usleep(1000);
        }
        kill(impl_->pid, SIGKILL);
        waitpid(impl_->pid, &status, 0);
        impl_->pid = -1;
    }
}

bool ChildProcessTransport::alive() const {
    if (impl_->pid <= 0) return false;
    return ::kill(impl_->pid, 0) == 0;
}

// ---------------------------------------------------------------------------
// Session record/replay

std::vector<SessionEvent> load_session(const std::string& path) {
    std::vector<SessionEvent> events;
    std::ifstream in(path);
    if (!in) throw TransportClosed("cannot open session file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        json j = json::parse(line);
        SessionEvent e;
        e.dir = j.at("dir").get<std::string>() == "client" ? SessionEvent::Dir::Client
                                                           : SessionEvent::Dir::Server;
        e.body = j.at("body").dump();
        events.push_back(std::move(e));
    }
    return events;
}

void save_session(const std::string& path, const std::vector<SessionEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        ordered_json j;
        j["dir"] = e.dir == SessionEvent::Dir::Client ? "client" : "server";
        j["body"] = json::parse(e.body);
        out += j.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

ReplayTransport::ReplayTransport(std::vector<SessionEvent> events) : events_(std::move(events)) {}

void ReplayTransport::enqueue_server_events_locked() {
    while (cursor_ < events_.size() && events_[cursor_].dir == SessionEvent::Dir::Server) {
        inbox_.push_back(events_[cursor_].body);
        ++cursor_;
    }
}

void ReplayTransport::send(const std::string& body) {
    std::lock_guard<std::mutex> lock(mu_);
    if (closed_) throw TransportClosed("replay transport closed");
    enqueue_server_events_locked();
    if (cursor_ >= events_.size()) {
        throw TransportClosed("replay exhausted: unexpected client message " + body);
    }
    json sent = json::parse(body);
    json expected = json::parse(events_[cursor_].body);
    std::string sent_method = sent.value("method", "");
    std::string expected_method = expected.value("method", "");
    if (sent_method != expected_method) {
        throw TransportClosed("replay mismatch: sent method '" + sent_method +
                              "', transcript expects '" + expected_method + "'");
    }
    ++cursor_;
    enqueue_server_events_locked();
}

bool ReplayTransport::receive(std::string& body, int timeout_ms) {
    (void)timeout_ms;
    std::lock_guard<std::mutex> lock(mu_);
    enqueue_server_events_locked();
    if (inbox_pos_ < inbox_.size()) {
        body = inbox_[inbox_pos_++];
        return true;
    }
    if (closed_ || cursor_ >= events_.size()) return false;
    return false;  // waiting on the client to advance the script
}

void ReplayTransport::close() {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
}

// ---------------------------------------------------------------------------
// RecordingTransport

RecordingTransport::RecordingTransport(std::unique_ptr<Transport> inner, std::string out_path)
    : inner_(std::move(inner)), out_path_(std::move(out_path)) {}

RecordingTransport::~RecordingTransport() {
    std::lock_guard<std::mutex> lock(mu_);
    save_locked();
}

void RecordingTransport::send(const std::string& body) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        events_.push_back({SessionEvent::Dir::Client, body});
    }
    inner_->send(body);
}

bool RecordingTransport::receive(std::string& body, int timeout_ms) {
    if (!inner_->receive(body, timeout_ms)) return false;
    std::lock_guard<std::mutex> lock(mu_);
    events_.push_back({SessionEvent::Dir::Server, body});
    return true;
}

void RecordingTransport::close() {
    inner_->close();
    std::lock_guard<std::mutex> lock(mu_);
    save_locked();
}

void RecordingTransport::save_locked() {
    if (saved_) return;
    save_session(out_path_, events_);
    saved_ = true;
}

}  // namespace warnfix::lsp
