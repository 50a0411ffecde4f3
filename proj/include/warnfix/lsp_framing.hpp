#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace warnfix::lsp {

// LSP base-protocol framing: "Content-Length: N\r\n\r\n" + body, bit-exact.
std::string frame(std::string_view body);

// Incremental decoder for a framed byte stream. feed() bytes, then drain next().
class FrameDecoder {
public:
    void feed(std::string_view bytes) { buffer_.append(bytes.data(), bytes.size()); }

    // Next complete message body, if one is buffered. Unknown headers are ignored;
    // a missing Content-Length makes the stream unrecoverable and throws.
    std::optional<std::string> next();

private:
    std::string buffer_;
};

struct FramingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace warnfix::lsp
