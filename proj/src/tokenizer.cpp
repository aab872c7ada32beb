#include "coderag/tokenizer.hpp"

#include "coderag/text.hpp"

namespace coderag {

std::vector<std::string_view> Tokenizer::tokens(std::string_view text) const {
    std::vector<std::string_view> out;
    for (const auto& sp : spans(text)) out.push_back(text.substr(sp.begin, sp.end - sp.begin));
    return out;
}

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

template <typename Sink>
void scan_code_tokens(std::string_view text, Sink&& sink) {
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (is_blank(c)) {
            ++i;
        } else if (text::is_word_char(c)) {
            std::size_t j = i + 1;
            while (j < text.size() && text::is_word_char(text[j])) ++j;
            sink(i, j);
            i = j;
        } else if (static_cast<unsigned char>(c) >= 0x80U) {
            const std::size_t n = text::utf8_sequence_length(text, i);
            sink(i, i + n);
            i += n;
        } else {
            // newline and ASCII punctuation are single-character tokens
            sink(i, i + 1);
            ++i;
        }
    }
}

} // namespace

std::vector<TokenSpan> CodeTokenizer::spans(std::string_view text) const {
    std::vector<TokenSpan> out;
    scan_code_tokens(text, [&](std::size_t b, std::size_t e) { out.push_back({b, e}); });
    return out;
}

std::size_t CodeTokenizer::count(std::string_view text) const {
    std::size_t n = 0;
    scan_code_tokens(text, [&](std::size_t, std::size_t) { ++n; });
    return n;
}

const Tokenizer& default_tokenizer() {
    static const CodeTokenizer tokenizer;
    return tokenizer;
}

std::uint32_t Vocabulary::id_of(std::string_view token) {
    auto it = ids_.find(std::string(token));
    if (it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(tokens_.size());
    tokens_.emplace_back(token);
    ids_.emplace(tokens_.back(), id);
    return id;
}

} // namespace coderag
