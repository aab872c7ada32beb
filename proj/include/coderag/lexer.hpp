#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace coderag::cfamily {

enum class TokenKind : std::uint8_t { identifier, number, string_literal, char_literal, punct };

struct Token {
    TokenKind kind;
    std::string_view text;
    std::size_t line;   // 1-based
    std::size_t offset; // byte offset into the lexed text

    bool is(std::string_view s) const { return text == s; }
    bool is_ident() const { return kind == TokenKind::identifier; }
};

struct Directive {
    std::size_t first_line;
    std::size_t last_line;
    std::string_view text; // raw, from '#' up to the end of the last continued line
};

/// Per-line classification, indexed by line - 1.
enum LineFlags : std::uint8_t { kLineHasCode = 1U, kLineHasComment = 2U };

struct LexResult {
    std::vector<Token> tokens;        // preprocessor lines and comments excluded
    std::vector<Directive> directives;
    std::vector<std::string_view> comments; // comment bodies without delimiters
    std::vector<std::uint8_t> line_flags;
    bool ok = true;
    std::string error; // first problem found (unterminated comment or literal)
};

/// Lexes C/C++ source. Never throws: problems set ok=false and the lexer
/// continues, treating an unterminated construct as running to end of input.
/// `::` and `->` are single punctuation tokens; everything else is one char.
LexResult lex(std::string_view source);

/// Body text of a #define directive (after the name and parameter list),
/// with line continuations removed and surrounding whitespace trimmed.
/// Empty when the directive is not a #define.
std::string define_body(std::string_view directive);

} // namespace coderag::cfamily
