#pragma once

#include "coderag/corpus.hpp"
#include "coderag/retrieval.hpp"

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coderag {

struct PromptConfig {
    std::string separator = "\n\n";
    std::size_t max_prompt_tokens = 4096 - 512; // sequence length minus generation budget
    bool include_source_header = false;         // prefix each unit with "// <path>\n"

    /// Throws DataError when max_prompt_tokens is zero.
    void validate() const;
};

struct PromptBundle {
    std::string prompt_text;
    std::string query_text;
    std::vector<UnitId> included_unit_ids; // concatenation order
    std::size_t prompt_token_count = 0;
    bool truncated = false;
};

/// Id lookup over a unit list. The units must outlive the catalog.
class UnitCatalog {
public:
    UnitCatalog() = default;
    explicit UnitCatalog(const std::vector<RetrievalUnit>& units);

    /// Throws DataError for an unknown id.
    const RetrievalUnit& at(UnitId id) const;
    bool contains(UnitId id) const { return by_id_.contains(id); }
    std::size_t size() const noexcept { return ids_.size(); }
    /// Ascending.
    const std::vector<UnitId>& ids() const noexcept { return ids_; }

private:
    std::unordered_map<UnitId, const RetrievalUnit*> by_id_;
    std::vector<UnitId> ids_;
};

std::size_t count_tokens(std::string_view text, const Tokenizer& tokenizer = default_tokenizer());

/// Text a unit contributes to a prompt.
std::string unit_snippet(const RetrievalUnit& unit, const PromptConfig& cfg);

/// results must be ordered by descending score (rank 1 first). The prompt
/// is d_(K) + sep + ... + d_(1) + sep + query: the least similar unit comes
/// first and the best match sits right before the query. While the prompt
/// is over budget, whole units are dropped from the front. Throws DataError
/// when the query alone does not fit.
PromptBundle assemble_similarity_prompt(const std::vector<RetrievalResult>& results, const UnitCatalog& units,
                                        const std::string& query, const PromptConfig& cfg,
                                        const Tokenizer& tokenizer = default_tokenizer());

/// defs in call order (first call first). The prompt is d_m + ... + d_1 +
/// query, so the first-called definition is adjacent to the query. Same
/// budget rule as the similarity prompt.
PromptBundle assemble_dependency_prompt(const std::vector<RetrievalResult>& defs, const UnitCatalog& units,
                                        const std::string& query, const PromptConfig& cfg,
                                        const Tokenizer& tokenizer = default_tokenizer());

/// Shared core: pieces are already in prompt order.
PromptBundle assemble_prompt(const std::vector<std::pair<UnitId, std::string>>& pieces, const std::string& query,
                             const PromptConfig& cfg, const Tokenizer& tokenizer = default_tokenizer());

} // namespace coderag
