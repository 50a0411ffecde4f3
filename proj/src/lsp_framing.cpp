#include "warnfix/lsp_framing.hpp"

#include <cstdlib>

namespace warnfix::lsp {

std::string frame(std::string_view body) {
    std::string out = "Content-Length: " + std::to_string(body.size()) + "\r\n\r\n";
    out.append(body.data(), body.size());
    return out;
}

std::optional<std::string> FrameDecoder::next() {
    size_t header_end = buffer_.find("\r\n\r\n");
    if (header_end == std::string::npos) return std::nullopt;

    size_t content_length = std::string::npos;
    size_t pos = 0;
    while (pos < header_end) {
        size_t eol = buffer_.find("\r\n", pos);
        if (eol == std::string::npos || eol > header_end) eol = header_end;
        std::string_view line(buffer_.data() + pos, eol - pos);
        constexpr std::string_view kPrefix = "Content-Length:";
        if (line.size() > kPrefix.size() &&
            line.substr(0, kPrefix.size()) == kPrefix) {
            content_length = std::strtoull(line.data() + kPrefix.size(), nullptr, 10);
        }
        pos = eol + 2;
    }
    if (content_length == std::string::npos) {
        throw FramingError("frame header missing Content-Length");
    }
    size_t body_start = header_end + 4;
    if (buffer_.size() < body_start + content_length) return std::nullopt;
    std::string body = buffer_.substr(body_start, content_length);
    buffer_.erase(0, body_start + content_length);
    return body;
}

}  // namespace warnfix::lsp
