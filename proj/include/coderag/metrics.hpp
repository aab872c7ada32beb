#pragma once

#include "coderag/corpus.hpp"
#include "coderag/tokenizer.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace coderag {

/// Trims leading and trailing whitespace; inner spacing is kept.
std::string normalize_line(std::string_view text);

/// 1 when the normalized lines are byte-equal.
int exact_match(std::string_view prediction, std::string_view target);

/// Levenshtein distance over Unicode code points.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// 1 - lev(a, b) / max(|a|, |b|) over code points; 1 when both are empty.
double edit_similarity(std::string_view prediction, std::string_view target);

/// Sentence BLEU over tokenizer tokens with uniform weights for n = 1..max_n.
/// Higher-order precisions that would be zero are smoothed to
/// 1 / (candidates + 1); a zero unigram precision is not, so the score
/// drops to 0. An empty prediction scores 0 unless the target is empty too.
double bleu(std::string_view prediction, std::string_view target, int max_n = 4,
            const Tokenizer& tokenizer = default_tokenizer());
double bleu_tokens(const std::vector<std::string_view>& prediction, const std::vector<std::string_view>& target,
                   int max_n = 4);

/// Text before the first '\n' (the whole string when there is none).
std::string truncate_to_first_line(std::string_view model_output);

struct EvalRecord {
    InstanceId instance_id = 0;
    std::string prediction;
    std::string target;
    int em = 0;
    double es = 0.0;
    double bleu = 0.0;
    bool failed = false; // provider failure; excluded from means
    std::string error;
};

/// Normalizes both lines and fills em, es and bleu.
EvalRecord score_prediction(InstanceId id, std::string_view prediction, std::string_view target,
                            const Tokenizer& tokenizer = default_tokenizer());

struct EvalReport {
    std::string strategy;
    std::size_t k = 0;
    double corpus_fraction = 1.0;
    std::size_t n_instances = 0; // scored
    std::size_t n_failed = 0;
    double em_pct = 0.0;
    double es_pct = 0.0;
    double bleu_pct = 0.0;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Means over the non-failed records, summed in instance_id order and
/// scaled to percent. Throws DataError when no record was scored.
EvalReport aggregate(const std::vector<EvalRecord>& records, std::string strategy = {}, std::size_t k = 0,
                     double corpus_fraction = 1.0);

/// Rounds to two decimals for presentation.
double round2(double x);

nlohmann::json to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

} // namespace coderag
