#include "warnfix/prompt_format.hpp"

#include "warnfix/util.hpp"

namespace warnfix::prompt {

namespace {

bool is_label_line(const std::string& line) {
    std::string t = trim(line);
    return t.size() >= 2 && t.front() == '[' && t.back() == ']';
}

}  // namespace

std::optional<std::string> extract_block(const std::string& text, const std::string& label) {
    std::vector<std::string> lines = split_lines(text);
    std::string out;
    bool in_block = false, found = false;
    for (const std::string& line : lines) {
        if (in_block && is_label_line(line)) break;
        if (in_block) {
            out += line;
            out += '\n';
            continue;
        }
        if (trim(line) == label) {
            in_block = true;
            found = true;
        }
    }
    if (!found) return std::nullopt;
    return out;
}

std::optional<std::string> block_field(const std::string& block, const std::string& key) {
    const std::string prefix = key + ":";
    for (const std::string& line : split_lines(block)) {
        if (line.rfind(prefix, 0) != 0) continue;
        // keep the value verbatim (indentation matters for line-text fields);
        // strip only the key's separator space and a trailing CR
        std::string value = line.substr(prefix.size());
        if (!value.empty() && value.front() == ' ') value.erase(0, 1);
        while (!value.empty() && value.back() == '\r') value.pop_back();
        return value;
    }
    return std::nullopt;
}

}  // namespace warnfix::prompt
