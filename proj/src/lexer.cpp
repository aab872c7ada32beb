#include "coderag/lexer.hpp"

#include "coderag/text.hpp"

#include <algorithm>

namespace coderag::cfamily {

namespace {

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' ||
           static_cast<unsigned char>(c) >= 0x80U;
}

bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {
        out_.line_flags.assign(text::split_lines(src).size(), 0);
    }

    LexResult run() {
        while (i_ < src_.size()) step();
        return std::move(out_);
    }

private:
    char peek(std::size_t ahead = 0) const {
        return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
    }

    void mark(std::size_t line, std::uint8_t flag) {
        if (line >= 1 && line <= out_.line_flags.size()) out_.line_flags[line - 1] |= flag;
    }

    void mark_range(std::size_t first, std::size_t last, std::uint8_t flag) {
        for (std::size_t l = first; l <= last; ++l) mark(l, flag);
    }

    void fail(std::string msg) {
        if (out_.ok) {
            out_.ok = false;
            out_.error = std::move(msg) + " at line " + std::to_string(line_);
        }
    }

    // Advances over [i_, end) keeping the line counter in sync.
    void advance_to(std::size_t end) {
        line_ += static_cast<std::size_t>(std::count(src_.begin() + static_cast<std::ptrdiff_t>(i_),
                                                     src_.begin() + static_cast<std::ptrdiff_t>(end),
                                                     '\n'));
        i_ = end;
    }

    bool splice_at(std::size_t pos) const {
        if (pos >= src_.size() || src_[pos] != '\\') return false;
        if (pos + 1 < src_.size() && src_[pos + 1] == '\n') return true;
        return pos + 2 < src_.size() && src_[pos + 1] == '\r' && src_[pos + 2] == '\n';
    }

    // End of a logical line starting at pos: the first newline not preceded by
    // a line continuation.
    std::size_t logical_line_end(std::size_t pos) const {
        while (pos < src_.size() && src_[pos] != '\n') {
            if (splice_at(pos)) {
                pos = src_.find('\n', pos) + 1;
                continue;
            }
            ++pos;
        }
        return pos;
    }

    void step() {
        const char c = peek();
        if (c == '\n') {
            ++line_;
            ++i_;
            at_line_start_ = true;
            return;
        }
        if (splice_at(i_)) {
            advance_to(src_.find('\n', i_) + 1);
            return;
        }
        if (c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f') {
            ++i_;
            return;
        }
        if (c == '/' && peek(1) == '/') {
            line_comment();
            return;
        }
        if (c == '/' && peek(1) == '*') {
            block_comment();
            return;
        }
        if (c == '#' && at_line_start_) {
            directive();
            return;
        }
        at_line_start_ = false;
        if (is_ident_start(c)) {
            identifier_or_prefixed_literal();
        } else if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
            number();
        } else if (c == '"') {
            quoted(i_, i_, '"', TokenKind::string_literal);
        } else if (c == '\'') {
            quoted(i_, i_, '\'', TokenKind::char_literal);
        } else if ((c == ':' && peek(1) == ':') || (c == '-' && peek(1) == '>')) {
            emit(TokenKind::punct, i_, i_ + 2);
            i_ += 2;
        } else {
            emit(TokenKind::punct, i_, i_ + 1);
            ++i_;
        }
    }

    void emit(TokenKind kind, std::size_t begin, std::size_t end) {
        out_.tokens.push_back({kind, src_.substr(begin, end - begin), line_, begin});
        mark(line_, kLineHasCode);
    }

    void line_comment() {
        const std::size_t end = logical_line_end(i_);
        out_.comments.push_back(src_.substr(i_ + 2, end - i_ - 2));
        const std::size_t first = line_;
        advance_to(end);
        mark_range(first, line_, kLineHasComment);
    }

    void block_comment() {
        const std::size_t close = src_.find("*/", i_ + 2);
        const std::size_t first = line_;
        if (close == std::string_view::npos) {
            fail("unterminated block comment");
            out_.comments.push_back(src_.substr(i_ + 2));
            advance_to(src_.size());
        } else {
            out_.comments.push_back(src_.substr(i_ + 2, close - i_ - 2));
            advance_to(close + 2);
        }
        mark_range(first, line_, kLineHasComment);
    }

    void directive() {
        const std::size_t start = i_;
        const std::size_t first = line_;
        std::size_t pos = i_ + 1;
        // Scan the logical line; comments and literals inside do not end it.
        while (pos < src_.size() && src_[pos] != '\n') {
            if (splice_at(pos)) {
                pos = src_.find('\n', pos) + 1;
            } else if (src_[pos] == '/' && pos + 1 < src_.size() && src_[pos + 1] == '/') {
                pos = logical_line_end(pos);
            } else if (src_[pos] == '/' && pos + 1 < src_.size() && src_[pos + 1] == '*') {
                const std::size_t close = src_.find("*/", pos + 2);
                if (close == std::string_view::npos) {
                    fail("unterminated block comment");
                    pos = src_.size();
                } else {
                    pos = close + 2;
                }
            } else if (src_[pos] == '"' || src_[pos] == '\'') {
                const char q = src_[pos];
                ++pos;
                while (pos < src_.size() && src_[pos] != q && src_[pos] != '\n') {
                    pos += src_[pos] == '\\' ? 2 : 1;
                }
                if (pos < src_.size() && src_[pos] == q) ++pos;
            } else {
                ++pos;
            }
        }
        pos = std::min(pos, src_.size());
        advance_to(pos);
        out_.directives.push_back({first, line_, src_.substr(start, pos - start)});
        mark_range(first, line_, kLineHasCode);
    }

    void identifier_or_prefixed_literal() {
        std::size_t j = i_;
        while (j < src_.size() && is_ident_char(src_[j])) ++j;
        const std::string_view word = src_.substr(i_, j - i_);
        const char next = j < src_.size() ? src_[j] : '\0';
        if (next == '"' && (word == "R" || word == "u8R" || word == "uR" || word == "UR" || word == "LR")) {
            raw_string(i_, j);
            return;
        }
        if ((next == '"' || next == '\'') && (word == "u8" || word == "u" || word == "U" || word == "L")) {
            quoted(i_, j, next, next == '"' ? TokenKind::string_literal : TokenKind::char_literal);
            return;
        }
        emit(TokenKind::identifier, i_, j);
        i_ = j;
    }

    void number() {
        std::size_t j = i_;
        while (j < src_.size()) {
            const char c = src_[j];
            if (is_ident_char(c) || c == '.') {
                ++j;
            } else if (c == '\'' && j + 1 < src_.size() && text::is_word_char(src_[j + 1])) {
                ++j; // digit separator
            } else if ((c == '+' || c == '-') && j > i_ &&
                       (src_[j - 1] == 'e' || src_[j - 1] == 'E' || src_[j - 1] == 'p' ||
                        src_[j - 1] == 'P')) {
                ++j;
            } else {
                break;
            }
        }
        emit(TokenKind::number, i_, j);
        i_ = j;
    }

    // start: token start (including any prefix); quote_pos: opening quote.
    void quoted(std::size_t start, std::size_t quote_pos, char quote, TokenKind kind) {
        std::size_t j = quote_pos + 1;
        bool closed = false;
        while (j < src_.size()) {
            const char c = src_[j];
            if (c == '\\') {
                if (splice_at(j)) {
                    j = src_.find('\n', j) + 1;
                    continue;
                }
                j += 2;
                continue;
            }
            if (c == '\n') break;
            if (c == quote) {
                closed = true;
                ++j;
                break;
            }
            ++j;
        }
        j = std::min(j, src_.size());
        if (!closed) fail(kind == TokenKind::string_literal ? "unterminated string literal"
                                                            : "unterminated character literal");
        const std::size_t first = line_;
        emit(kind, start, j);
        advance_to(j);
        mark_range(first, line_, kLineHasCode);
    }

    void raw_string(std::size_t start, std::size_t quote_pos) {
        const std::size_t open = src_.find('(', quote_pos + 1);
        std::size_t end = src_.size();
        if (open == std::string_view::npos || open - quote_pos - 1 > 16) {
            fail("malformed raw string literal");
        } else {
            std::string terminator = ")";
            terminator.append(src_.substr(quote_pos + 1, open - quote_pos - 1));
            terminator.push_back('"');
            const std::size_t close = src_.find(terminator, open + 1);
            if (close == std::string_view::npos) {
                fail("unterminated raw string literal");
            } else {
                end = close + terminator.size();
            }
        }
        const std::size_t first = line_;
        emit(TokenKind::string_literal, start, end);
        advance_to(end);
        mark_range(first, line_, kLineHasCode);
    }

    std::string_view src_;
    std::size_t i_ = 0;
    std::size_t line_ = 1;
    bool at_line_start_ = true;
    LexResult out_;
};

} // namespace

LexResult lex(std::string_view source) { return Lexer(source).run(); }

std::string define_body(std::string_view directive) {
    std::string flat;
    flat.reserve(directive.size());
    for (std::size_t i = 0; i < directive.size(); ++i) {
        if (directive[i] == '\\') {
            std::size_t j = i + 1;
            if (j < directive.size() && directive[j] == '\r') ++j;
            if (j < directive.size() && directive[j] == '\n') {
                i = j;
                continue;
            }
        }
        flat.push_back(directive[i]);
    }
    std::string_view s = flat;
    std::size_t p = 1; // past '#'
    auto skip_ws = [&] {
        while (p < s.size() && (s[p] == ' ' || s[p] == '\t')) ++p;
    };
    skip_ws();
    if (s.substr(p, 6) != "define") return {};
    p += 6;
    if (p < s.size() && is_ident_char(s[p])) return {};
    skip_ws();
    while (p < s.size() && is_ident_char(s[p])) ++p; // macro name
    if (p < s.size() && s[p] == '(') {
        const std::size_t close = s.find(')', p);
        p = close == std::string_view::npos ? s.size() : close + 1;
    }
    return std::string(text::trim(s.substr(std::min(p, s.size()))));
}

} // namespace coderag::cfamily
