#include "coderag/metrics.hpp"

#include "coderag/error.hpp"
#include "coderag/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace coderag {

std::string normalize_line(std::string_view text) { return std::string(text::trim(text)); }

int exact_match(std::string_view prediction, std::string_view target) {
    return normalize_line(prediction) == normalize_line(target) ? 1 : 0;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

double edit_similarity(std::string_view prediction, std::string_view target) {
    const auto a = text::decode_utf8(prediction);
    const auto b = text::decode_utf8(target);
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

double bleu_tokens(const std::vector<std::string_view>& prediction, const std::vector<std::string_view>& target,
                   int max_n) {
    if (max_n < 1) throw DataError("bleu max_n must be at least 1");
    const std::size_t c = prediction.size(), r = target.size();
    if (c == 0) return r == 0 ? 1.0 : 0.0;

    double log_sum = 0.0;
    for (int n = 1; n <= max_n; ++n) {
        const std::size_t un = static_cast<std::size_t>(n);
        std::map<std::vector<std::string_view>, std::size_t> ref;
        for (std::size_t i = 0; i + un <= r; ++i) ++ref[{target.begin() + i, target.begin() + i + un}];
        std::map<std::vector<std::string_view>, std::size_t> cand;
        for (std::size_t i = 0; i + un <= c; ++i) ++cand[{prediction.begin() + i, prediction.begin() + i + un}];
        std::size_t matched = 0, total = c >= un ? c - un + 1 : 0;
        for (const auto& [gram, count] : cand) {
            auto it = ref.find(gram);
            if (it != ref.end()) matched += std::min(count, it->second);
        }
        double p;
        if (matched == 0) {
            if (n == 1) return 0.0;
            p = 1.0 / static_cast<double>(total + 1);
        } else {
            p = static_cast<double>(matched) / static_cast<double>(total);
        }
        log_sum += std::log(p);
    }
    const double bp = c > r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
    return std::min(1.0, bp * std::exp(log_sum / max_n));
}

double bleu(std::string_view prediction, std::string_view target, int max_n, const Tokenizer& tokenizer) {
    return bleu_tokens(tokenizer.tokens(prediction), tokenizer.tokens(target), max_n);
}

std::string truncate_to_first_line(std::string_view model_output) {
    return std::string(model_output.substr(0, model_output.find('\n')));
}

EvalRecord score_prediction(InstanceId id, std::string_view prediction, std::string_view target,
                            const Tokenizer& tokenizer) {
    EvalRecord r;
    r.instance_id = id;
    r.prediction = std::string(prediction);
    r.target = std::string(target);
    const std::string p = normalize_line(prediction), t = normalize_line(target);
    r.em = p == t ? 1 : 0;
    r.es = edit_similarity(p, t);
    r.bleu = bleu(p, t, 4, tokenizer);
    return r;
}

EvalReport aggregate(const std::vector<EvalRecord>& records, std::string strategy, std::size_t k,
                     double corpus_fraction) {
    std::vector<const EvalRecord*> order;
    order.reserve(records.size());
    for (const auto& r : records) order.push_back(&r);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->instance_id < b->instance_id; });

    EvalReport rep;
    rep.strategy = std::move(strategy);
    rep.k = k;
    rep.corpus_fraction = corpus_fraction;
    double em = 0.0, es = 0.0, bl = 0.0;
    for (const auto* r : order) {
        if (r->failed) {
            ++rep.n_failed;
            continue;
        }
        ++rep.n_instances;
        em += r->em;
        es += r->es;
        bl += r->bleu;
    }
    if (rep.n_instances == 0) throw DataError("cannot aggregate: no scored records");
    const double n = static_cast<double>(rep.n_instances);
    rep.em_pct = 100.0 * em / n;
    rep.es_pct = 100.0 * es / n;
    rep.bleu_pct = 100.0 * bl / n;
    return rep;
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

nlohmann::json to_json(const EvalReport& r) {
    return {{"strategy", r.strategy},       {"k", r.k},
            {"corpus_fraction", r.corpus_fraction}, {"n", r.n_instances},
            {"n_failed", r.n_failed},       {"em_pct", round2(r.em_pct)},
            {"es_pct", round2(r.es_pct)},   {"bleu_pct", round2(r.bleu_pct)}};
}

EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport r;
    r.strategy = j.at("strategy").get<std::string>();
    r.k = j.at("k").get<std::size_t>();
    r.corpus_fraction = j.value("corpus_fraction", 1.0);
    r.n_instances = j.at("n").get<std::size_t>();
    r.n_failed = j.value("n_failed", std::size_t{0});
    r.em_pct = j.at("em_pct").get<double>();
    r.es_pct = j.at("es_pct").get<double>();
    r.bleu_pct = j.at("bleu_pct").get<double>();
    return r;
}

} // namespace coderag
