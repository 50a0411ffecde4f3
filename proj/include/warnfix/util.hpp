#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace warnfix {

// FNV-1a 64-bit. Used for content digests (patch staleness, prompt hashes,
// transcript matching). Stable across platforms and runs.
inline uint64_t fnv1a(std::string_view data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a_hex(std::string_view data);

// Splits into lines. Line terminators are not kept; `trailing_newline`
// reports whether the input ended with '\n' so joins can round-trip.
std::vector<std::string> split_lines(std::string_view text, bool* trailing_newline = nullptr);

std::string join_lines(const std::vector<std::string>& lines, bool trailing_newline);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);

std::string trim(std::string_view s);

}  // namespace warnfix
