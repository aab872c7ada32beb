#include "coderag/text.hpp"

namespace coderag::text {

namespace {

constexpr bool is_cont(unsigned char c) { return (c & 0xC0U) == 0x80U; }

// Returns the sequence length at pos, or 0 when the bytes there are not a
// well-formed UTF-8 sequence (overlongs and surrogates rejected).
std::size_t valid_sequence(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    const std::size_t left = s.size() - pos;
    if (b0 < 0x80U) return 1;
    auto at = [&](std::size_t i) { return static_cast<unsigned char>(s[pos + i]); };
    if (b0 >= 0xC2U && b0 <= 0xDFU) {
        return left >= 2 && is_cont(at(1)) ? 2 : 0;
    }
    if (b0 >= 0xE0U && b0 <= 0xEFU) {
        if (left < 3 || !is_cont(at(1)) || !is_cont(at(2))) return 0;
        if (b0 == 0xE0U && at(1) < 0xA0U) return 0;
        if (b0 == 0xEDU && at(1) > 0x9FU) return 0;
        return 3;
    }
    if (b0 >= 0xF0U && b0 <= 0xF4U) {
        if (left < 4 || !is_cont(at(1)) || !is_cont(at(2)) || !is_cont(at(3))) return 0;
        if (b0 == 0xF0U && at(1) < 0x90U) return 0;
        if (b0 == 0xF4U && at(1) > 0x8FU) return 0;
        return 4;
    }
    return 0;
}

} // namespace

bool is_valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const std::size_t n = valid_sequence(s, i);
        if (n == 0) return false;
        i += n;
    }
    return true;
}

std::size_t utf8_sequence_length(std::string_view s, std::size_t pos) {
    const std::size_t n = valid_sequence(s, pos);
    return n == 0 ? 1 : n;
}

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const std::size_t n = valid_sequence(s, i);
        const auto b0 = static_cast<unsigned char>(s[i]);
        if (n <= 1) {
            out.push_back(b0);
            ++i;
            continue;
        }
        char32_t cp = b0 & (0xFFU >> (n + 1));
        for (std::size_t k = 1; k < n; ++k) {
            cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3FU);
        }
        out.push_back(cp);
        i += n;
    }
    return out;
}

std::size_t utf8_length(std::string_view s) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.size(); i += utf8_sequence_length(s, i)) ++count;
    return count;
}

std::vector<std::string_view> split_lines(std::string_view s) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < s.size()) {
        const std::size_t nl = s.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(s.substr(start));
            break;
        }
        lines.push_back(s.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\v\f";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::string join_lines(const std::vector<std::string_view>& lines, std::size_t first,
                       std::size_t last) {
    std::string out;
    for (std::size_t i = first; i <= last; ++i) {
        if (i != first) out.push_back('\n');
        out.append(lines[i - 1]);
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
        if (ws) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

} // namespace coderag::text
