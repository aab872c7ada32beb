#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace coderag::text {

bool is_valid_utf8(std::string_view s);

/// Decodes UTF-8 into code points. Invalid bytes decode as themselves.
std::u32string decode_utf8(std::string_view s);

/// Number of UTF-8 code points; invalid bytes count one each.
std::size_t utf8_length(std::string_view s);

/// Length in bytes of the UTF-8 sequence starting at s[pos] (1 when invalid).
std::size_t utf8_sequence_length(std::string_view s, std::size_t pos);

/// Splits on '\n'. A trailing newline terminates the last line rather than
/// starting an empty one, so "a\nb\n" and "a\nb" both have two lines.
std::vector<std::string_view> split_lines(std::string_view s);

std::string_view trim(std::string_view s);

/// Lines [first, last] (1-based, inclusive) joined with '\n', without a
/// trailing newline.
std::string join_lines(const std::vector<std::string_view>& lines, std::size_t first,
                       std::size_t last);

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0);

/// Collapses every whitespace run to one space and trims both ends.
std::string normalize_whitespace(std::string_view s);

bool is_word_char(char c);

} // namespace coderag::text
