#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coderag {

/// Half-open byte range of one token inside the tokenized text.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

/// Pluggable tokenizer used for all token accounting (file statistics,
/// prompt budgets, BLEU, training blocks).
class Tokenizer {
public:
    virtual ~Tokenizer() = default;

    /// Stable identifier written into every store header.
    virtual std::string_view id() const = 0;
    virtual std::vector<TokenSpan> spans(std::string_view text) const = 0;
    virtual std::size_t count(std::string_view text) const { return spans(text).size(); }

    std::vector<std::string_view> tokens(std::string_view text) const;
};

/// Deterministic code tokenizer.
///
/// Token classes: maximal runs of [A-Za-z0-9_] (identifiers and numbers),
/// single ASCII punctuation characters, single UTF-8 code points outside
/// ASCII, and the newline character. Other whitespace separates tokens and
/// is dropped. Only word runs can merge across a concatenation boundary, so
/// count(a + sep + b) == count(a) + count(sep) + count(b) whenever sep starts
/// and ends with a non-word character.
class CodeTokenizer final : public Tokenizer {
public:
    static constexpr std::string_view kId = "code-v1";

    std::string_view id() const override { return kId; }
    std::vector<TokenSpan> spans(std::string_view text) const override;
    std::size_t count(std::string_view text) const override;
};

const Tokenizer& default_tokenizer();

/// Maps token strings to dense ids in first-seen order.
class Vocabulary {
public:
    std::uint32_t id_of(std::string_view token);
    std::size_t size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

private:
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::vector<std::string> tokens_;
};

} // namespace coderag
