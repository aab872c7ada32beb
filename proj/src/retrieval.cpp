#include "coderag/retrieval.hpp"

#include "coderag/error.hpp"
#include "coderag/sampling.hpp"
#include "coderag/store.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace coderag {

using nlohmann::json;

namespace {

bool is_ascii_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool better(const RetrievalResult& a, const RetrievalResult& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.unit_id < b.unit_id;
}

TopK select_top(std::vector<RetrievalResult> scored, std::size_t k) {
    TopK out;
    if (k > scored.size()) {
        out.clamped = true;
        k = scored.size();
    }
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), better);
    scored.resize(k);
    for (std::size_t i = 0; i < k; ++i) scored[i].rank = i + 1;
    out.results = std::move(scored);
    return out;
}

std::vector<std::string> distinct_sorted(std::vector<std::string> terms) {
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

} // namespace

std::vector<std::string> tokenize_for_index(std::string_view text) {
    std::vector<std::string> terms;
    std::string cur;
    for (char c : text) {
        if (is_ascii_alnum(c)) {
            cur.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
        } else if (!cur.empty()) {
            terms.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) terms.push_back(std::move(cur));
    return terms;
}

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::sim_bm25: return "sim_bm25";
    case Strategy::sim_vector: return "sim_vector";
    case Strategy::dependency: return "dependency";
    case Strategy::random: return "random";
    }
    return "?";
}

Strategy strategy_from_string(std::string_view s) {
    std::string norm(s);
    std::replace(norm.begin(), norm.end(), '-', '_');
    if (norm == "sim_bm25" || norm == "bm25") return Strategy::sim_bm25;
    if (norm == "sim_vector" || norm == "vector") return Strategy::sim_vector;
    if (norm == "dependency") return Strategy::dependency;
    if (norm == "random") return Strategy::random;
    throw DataError("unknown retrieval strategy '" + std::string(s) + "'");
}

// ---- lexical ----

LexicalIndex LexicalIndex::build(const std::vector<RetrievalUnit>& units, Bm25Params params) {
    if (units.empty()) throw DataError("cannot build a lexical index from zero units");
    if (!(params.k1 >= 0.0) || !(params.b >= 0.0 && params.b <= 1.0)) {
        throw DataError("BM25 parameters out of range (k1 >= 0, 0 <= b <= 1)");
    }
    std::vector<const RetrievalUnit*> order;
    order.reserve(units.size());
    for (const auto& u : units) order.push_back(&u);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (order[i]->id == order[i - 1]->id) {
            throw DataError("duplicate unit id " + std::to_string(order[i]->id) + " in lexical index input");
        }
    }

    LexicalIndex idx;
    idx.params_ = params;
    for (const auto* u : order) {
        auto terms = tokenize_for_index(u->content);
        idx.doc_ids_.push_back(u->id);
        idx.doc_lens_.push_back(static_cast<std::uint32_t>(terms.size()));
        std::map<std::string, std::uint32_t, std::less<>> tf;
        for (auto& t : terms) ++tf[std::move(t)];
        for (auto& [term, n] : tf) idx.postings_[term].push_back({u->id, n});
    }
    idx.finish();
    return idx;
}

void LexicalIndex::finish() {
    positions_.clear();
    double total = 0.0;
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        positions_.emplace(doc_ids_[i], i);
        total += doc_lens_[i];
    }
    avg_doc_len_ = doc_ids_.empty() ? 0.0 : total / static_cast<double>(doc_ids_.size());
}

std::size_t LexicalIndex::position(UnitId id) const {
    auto it = positions_.find(id);
    if (it == positions_.end()) throw DataError("unit id " + std::to_string(id) + " is not in the lexical index");
    return it->second;
}

std::uint32_t LexicalIndex::doc_len(UnitId id) const { return doc_lens_[position(id)]; }

const std::vector<LexicalIndex::Posting>& LexicalIndex::postings(const std::string& term) const {
    static const std::vector<Posting> kEmpty;
    auto it = postings_.find(term);
    return it == postings_.end() ? kEmpty : it->second;
}

std::size_t LexicalIndex::doc_freq(const std::string& term) const { return postings(term).size(); }

double LexicalIndex::idf(const std::string& term) const {
    const double n = static_cast<double>(doc_count());
    const double df = static_cast<double>(doc_freq(term));
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double LexicalIndex::term_weight(double idf, std::uint32_t tf, std::uint32_t dl) const {
    const double f = tf;
    const double norm = 1.0 - params_.b + params_.b * (static_cast<double>(dl) / avg_doc_len_);
    return idf * (f * (params_.k1 + 1.0) / (f + params_.k1 * norm));
}

double LexicalIndex::score(const std::vector<std::string>& query_terms, UnitId id) const {
    const std::size_t pos = position(id);
    double s = 0.0;
    for (const auto& term : distinct_sorted(query_terms)) {
        const auto& plist = postings(term);
        auto it = std::lower_bound(plist.begin(), plist.end(), id,
                                   [](const Posting& p, UnitId v) { return p.unit_id < v; });
        if (it == plist.end() || it->unit_id != id) continue;
        s += term_weight(idf(term), it->tf, doc_lens_[pos]);
    }
    return s;
}

TopK LexicalIndex::topk(std::string_view query_text, std::size_t k) const {
    return topk_terms(tokenize_for_index(query_text), k);
}

TopK LexicalIndex::topk_terms(const std::vector<std::string>& query_terms, std::size_t k) const {
    if (k == 0) return {};
    std::vector<double> acc(doc_ids_.size(), 0.0);
    for (const auto& term : distinct_sorted(query_terms)) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double w = idf(term);
        for (const auto& p : it->second) {
            const std::size_t pos = positions_.at(p.unit_id);
            acc[pos] += term_weight(w, p.tf, doc_lens_[pos]);
        }
    }
    std::vector<RetrievalResult> scored(doc_ids_.size());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) scored[i] = {doc_ids_[i], acc[i], 0};
    auto out = select_top(std::move(scored), k);
    if (out.clamped) spdlog::warn("k={} exceeds the {} indexed units; returning all", k, doc_ids_.size());
    return out;
}

void LexicalIndex::save(const std::filesystem::path& path) const {
    json header = {{"format_version", kFormatVersion},
                   {"store", "lexical_index"},
                   {"k1", params_.k1},
                   {"b", params_.b},
                   {"tokenizer_id", kIndexTermsId},
                   {"doc_count", doc_count()},
                   {"avg_doc_len", avg_doc_len_}};
    JsonlWriter w(path, header);
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) w.write({{"doc", doc_ids_[i]}, {"len", doc_lens_[i]}});
    for (const auto& [term, plist] : postings_) {
        json arr = json::array();
        for (const auto& p : plist) arr.push_back({p.unit_id, p.tf});
        w.write({{"term", term}, {"postings", std::move(arr)}});
    }
    w.close();
}

LexicalIndex LexicalIndex::load(const std::filesystem::path& path) {
    auto contents = read_jsonl(path, "store", "lexical_index");
    if (contents.header.value("tokenizer_id", "") != kIndexTermsId) {
        throw FormatError(path.string() + ": lexical index built with an unknown term tokenizer");
    }
    LexicalIndex idx;
    idx.params_.k1 = contents.header.at("k1").get<double>();
    idx.params_.b = contents.header.at("b").get<double>();
    for (const auto& r : contents.records) {
        if (r.contains("doc")) {
            idx.doc_ids_.push_back(r["doc"].get<UnitId>());
            idx.doc_lens_.push_back(r.at("len").get<std::uint32_t>());
        } else {
            auto& plist = idx.postings_[r.at("term").get<std::string>()];
            for (const auto& p : r.at("postings")) plist.push_back({p.at(0).get<UnitId>(), p.at(1).get<std::uint32_t>()});
        }
    }
    idx.finish();
    for (const auto& [term, plist] : idx.postings_) {
        for (const auto& p : plist) {
            if (!idx.positions_.contains(p.unit_id)) {
                throw FormatError(path.string() + ": posting for '" + term + "' names unknown unit " +
                                  std::to_string(p.unit_id));
            }
        }
    }
    if (idx.doc_count() != contents.header.value("doc_count", idx.doc_count())) {
        throw FormatError(path.string() + ": document count does not match header");
    }
    return idx;
}

// ---- vectors ----

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double cosine_with_norms(const std::vector<double>& u, double un, const std::vector<double>& v, double vn) {
    double c = dot(u, v) / (un * vn);
    return std::clamp(c, -1.0, 1.0);
}

} // namespace

double EmbeddingVector::norm() const { return std::sqrt(dot(values, values)); }

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
    EmbeddingVector v{std::move(values), false};
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DataError("cannot normalize a zero or non-finite vector");
    for (auto& x : v.values) x /= n;
    v.unit_norm = true;
    return v;
}

double cosine_sim(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dims() != v.dims()) {
        throw DataError("cosine of vectors with different dims (" + std::to_string(u.dims()) + " vs " +
                        std::to_string(v.dims()) + ")");
    }
    const double un = u.norm(), vn = v.norm();
    if (un == 0.0 || vn == 0.0) throw DataError("cosine with a zero vector");
    return cosine_with_norms(u.values, un, v.values, vn);
}

void VectorIndex::add(UnitId id, EmbeddingVector v) {
    if (dims_ == 0) dims_ = v.dims();
    if (v.dims() != dims_) {
        throw DataError("vector for unit " + std::to_string(id) + " has " + std::to_string(v.dims()) +
                        " dims, index has " + std::to_string(dims_));
    }
    const double n = v.norm();
    if (n == 0.0) throw DataError("zero vector for unit " + std::to_string(id));
    if (!positions_.emplace(id, ids_.size()).second) {
        throw DataError("duplicate unit id " + std::to_string(id) + " in vector index");
    }
    ids_.push_back(id);
    vectors_.push_back(std::move(v));
    norms_.push_back(n);
}

TopK VectorIndex::topk(const EmbeddingVector& query, std::size_t k) const {
    if (query.dims() != dims_) {
        throw DataError("query has " + std::to_string(query.dims()) + " dims, index has " + std::to_string(dims_));
    }
    if (k == 0) return {};
    const double qn = query.norm();
    if (qn == 0.0) throw DataError("zero query vector");
    std::vector<RetrievalResult> scored(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        scored[i] = {ids_[i], cosine_with_norms(query.values, qn, vectors_[i].values, norms_[i]), 0};
    }
    auto out = select_top(std::move(scored), k);
    if (out.clamped) spdlog::warn("k={} exceeds the {} indexed vectors; returning all", k, ids_.size());
    return out;
}

void VectorIndex::save(const std::filesystem::path& path) const {
    JsonlWriter w(path, {{"format_version", kFormatVersion}, {"store", "vector_index"}, {"dims", dims_}});
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        w.write({{"id", ids_[i]}, {"unit_norm", vectors_[i].unit_norm}, {"values", vectors_[i].values}});
    }
    w.close();
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
    auto contents = read_jsonl(path, "store", "vector_index");
    VectorIndex idx(contents.header.at("dims").get<std::size_t>());
    if (idx.dims_ == 0) throw FormatError(path.string() + ": vector index with zero dims");
    for (const auto& r : contents.records) {
        EmbeddingVector v{r.at("values").get<std::vector<double>>(), r.value("unit_norm", false)};
        try {
            idx.add(r.at("id").get<UnitId>(), std::move(v));
        } catch (const DataError& e) {
            throw FormatError(path.string() + ": " + e.what());
        }
    }
    return idx;
}

// ---- symbols ----

std::string unqualified_name(std::string_view name) {
    auto pos = name.rfind("::");
    return std::string(pos == std::string_view::npos ? name : name.substr(pos + 2));
}

std::size_t common_path_prefix(std::string_view a, std::string_view b) {
    std::size_t n = 0;
    while (!a.empty() && !b.empty()) {
        auto ea = a.find('/'), eb = b.find('/');
        if (a.substr(0, ea) != b.substr(0, eb)) break;
        ++n;
        if (ea == std::string_view::npos || eb == std::string_view::npos) break;
        a.remove_prefix(ea + 1);
        b.remove_prefix(eb + 1);
    }
    return n;
}

SymbolIndex SymbolIndex::build(const std::vector<RetrievalUnit>& units) {
    SymbolIndex idx;
    for (const auto& u : units) {
        if (u.kind == UnitKind::whole_file || !u.name || u.name->empty()) continue;
        idx.names_[unqualified_name(*u.name)].push_back({u.id, u.source_path});
    }
    for (auto& [name, entries] : idx.names_) {
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.unit_id < b.unit_id; });
    }
    return idx;
}

std::size_t SymbolIndex::entry_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [name, entries] : names_) n += entries.size();
    return n;
}

const std::vector<SymbolIndex::Entry>& SymbolIndex::lookup(std::string_view name) const {
    static const std::vector<Entry> kEmpty;
    auto it = names_.find(name);
    return it == names_.end() ? kEmpty : it->second;
}

std::optional<UnitId> SymbolIndex::resolve(std::string_view name, std::string_view query_path) const {
    const auto& entries = lookup(name);
    if (entries.empty()) return std::nullopt;
    const Entry* best = nullptr;
    std::size_t best_common = 0;
    for (const auto& e : entries) { // ascending ids, so the first maximum wins ties
        const std::size_t c = common_path_prefix(e.source_path, query_path);
        if (!best || c > best_common) {
            best = &e;
            best_common = c;
        }
    }
    return best->unit_id;
}

void SymbolIndex::save(const std::filesystem::path& path) const {
    JsonlWriter w(path, {{"format_version", kFormatVersion},
                         {"store", "symbol_index"},
                         {"k1", nullptr},
                         {"b", nullptr},
                         {"tokenizer_id", default_grammar().id()}});
    for (const auto& [name, entries] : names_) {
        json arr = json::array();
        for (const auto& e : entries) arr.push_back({e.unit_id, e.source_path});
        w.write({{"name", name}, {"units", std::move(arr)}});
    }
    w.close();
}

SymbolIndex SymbolIndex::load(const std::filesystem::path& path) {
    auto contents = read_jsonl(path, "store", "symbol_index");
    SymbolIndex idx;
    for (const auto& r : contents.records) {
        auto& entries = idx.names_[r.at("name").get<std::string>()];
        for (const auto& e : r.at("units")) entries.push_back({e.at(0).get<UnitId>(), e.at(1).get<std::string>()});
    }
    return idx;
}

DependencyResult dependency_retrieve(const SymbolIndex& symbols, const std::vector<CallSite>& calls,
                                     std::string_view query_path) {
    DependencyResult out;
    std::set<std::string, std::less<>> seen;
    for (const auto& call : calls) {
        if (!seen.insert(call.name).second) continue;
        if (auto id = symbols.resolve(call.name, query_path)) {
            out.results.push_back({*id, 1.0, out.results.size() + 1});
        } else {
            ++out.misses;
        }
    }
    return out;
}

std::vector<RetrievalResult> random_retrieve(const std::vector<UnitId>& ids, std::size_t k, std::uint64_t seed) {
    if (k > ids.size()) {
        throw DataError("random retrieval of " + std::to_string(k) + " from " + std::to_string(ids.size()) + " units");
    }
    std::vector<RetrievalResult> out;
    out.reserve(k);
    for (std::size_t idx : sample_without_replacement(ids.size(), k, seed)) {
        out.push_back({ids[idx], 0.0, out.size() + 1});
    }
    return out;
}

} // namespace coderag
