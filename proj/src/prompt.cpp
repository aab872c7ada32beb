#include "coderag/prompt.hpp"

#include "coderag/error.hpp"

#include <algorithm>

namespace coderag {

void PromptConfig::validate() const {
    if (max_prompt_tokens == 0) throw DataError("prompt.max_prompt_tokens must be positive");
}

UnitCatalog::UnitCatalog(const std::vector<RetrievalUnit>& units) {
    by_id_.reserve(units.size());
    for (const auto& u : units) {
        if (!by_id_.emplace(u.id, &u).second) throw DataError("duplicate unit id " + std::to_string(u.id));
        ids_.push_back(u.id);
    }
    std::sort(ids_.begin(), ids_.end());
}

const RetrievalUnit& UnitCatalog::at(UnitId id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw DataError("unknown unit id " + std::to_string(id));
    return *it->second;
}

std::size_t count_tokens(std::string_view text, const Tokenizer& tokenizer) { return tokenizer.count(text); }

std::string unit_snippet(const RetrievalUnit& unit, const PromptConfig& cfg) {
    if (!cfg.include_source_header) return unit.content;
    return "// " + unit.source_path + "\n" + unit.content;
}

PromptBundle assemble_prompt(const std::vector<std::pair<UnitId, std::string>>& pieces, const std::string& query,
                             const PromptConfig& cfg, const Tokenizer& tokenizer) {
    cfg.validate();
    const std::size_t query_tokens = tokenizer.count(query);
    if (query_tokens > cfg.max_prompt_tokens) {
        throw DataError("query of " + std::to_string(query_tokens) + " tokens exceeds the prompt budget of " +
                        std::to_string(cfg.max_prompt_tokens));
    }
    PromptBundle out;
    out.query_text = query;
    for (std::size_t first = 0; first <= pieces.size(); ++first) {
        std::string text;
        for (std::size_t i = first; i < pieces.size(); ++i) {
            text += pieces[i].second;
            text += cfg.separator;
        }
        text += query;
        const std::size_t n = tokenizer.count(text);
        if (n <= cfg.max_prompt_tokens) {
            out.prompt_text = std::move(text);
            out.prompt_token_count = n;
            out.truncated = first > 0;
            for (std::size_t i = first; i < pieces.size(); ++i) out.included_unit_ids.push_back(pieces[i].first);
            return out;
        }
    }
    // Unreachable: the bare query fits.
    throw DataError("prompt assembly failed");
}

PromptBundle assemble_similarity_prompt(const std::vector<RetrievalResult>& results, const UnitCatalog& units,
                                        const std::string& query, const PromptConfig& cfg,
                                        const Tokenizer& tokenizer) {
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (results[i].score > results[i - 1].score) {
            throw DataError("similarity results must be ordered by descending score");
        }
    }
    std::vector<std::pair<UnitId, std::string>> pieces;
    pieces.reserve(results.size());
    for (auto it = results.rbegin(); it != results.rend(); ++it) {
        pieces.emplace_back(it->unit_id, unit_snippet(units.at(it->unit_id), cfg));
    }
    return assemble_prompt(pieces, query, cfg, tokenizer);
}

PromptBundle assemble_dependency_prompt(const std::vector<RetrievalResult>& defs, const UnitCatalog& units,
                                        const std::string& query, const PromptConfig& cfg,
                                        const Tokenizer& tokenizer) {
    std::vector<std::pair<UnitId, std::string>> pieces;
    pieces.reserve(defs.size());
    for (auto it = defs.rbegin(); it != defs.rend(); ++it) {
        pieces.emplace_back(it->unit_id, unit_snippet(units.at(it->unit_id), cfg));
    }
    return assemble_prompt(pieces, query, cfg, tokenizer);
}

} // namespace coderag
