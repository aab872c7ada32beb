#pragma once

#include "coderag/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coderag {

/// Splits on every character outside [A-Za-z0-9] and lowercases.
/// "fooBar(x_1)" -> {"foobar", "x", "1"}.
std::vector<std::string> tokenize_for_index(std::string_view text);

inline constexpr std::string_view kIndexTermsId = "index-terms-v1";

struct RetrievalResult {
    UnitId unit_id = 0;
    double score = 0.0;
    std::size_t rank = 0; // 1-based

    friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;
};

struct TopK {
    std::vector<RetrievalResult> results;
    bool clamped = false; // k exceeded the index size
};

enum class Strategy { sim_bm25, sim_vector, dependency, random };

std::string_view to_string(Strategy s);
/// Accepts both "sim_bm25" and "sim-bm25" spellings.
Strategy strategy_from_string(std::string_view s);

struct RetrievalConfig {
    Strategy strategy = Strategy::sim_bm25;
    std::size_t k = 5;
    std::uint64_t seed = 0;
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Okapi BM25 over an inverted index.
///
/// idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), which is never negative.
/// A query contributes each distinct term once; terms are summed in
/// lexicographic order so scores are reproducible bit for bit.
class LexicalIndex {
public:
    struct Posting {
        UnitId unit_id = 0;
        std::uint32_t tf = 0;

        friend bool operator==(const Posting&, const Posting&) = default;
    };

    /// Throws DataError on an empty unit set or duplicate unit ids.
    static LexicalIndex build(const std::vector<RetrievalUnit>& units, Bm25Params params = {});

    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    double avg_doc_len() const noexcept { return avg_doc_len_; }
    const Bm25Params& params() const noexcept { return params_; }
    std::size_t term_count() const noexcept { return postings_.size(); }

    /// Document ids in ascending order.
    const std::vector<UnitId>& doc_ids() const noexcept { return doc_ids_; }
    /// Throws DataError for an unknown id.
    std::uint32_t doc_len(UnitId id) const;
    std::size_t doc_freq(const std::string& term) const;
    /// Sorted by unit id; empty for an unknown term.
    const std::vector<Posting>& postings(const std::string& term) const;
    double idf(const std::string& term) const;

    /// Throws DataError for an unknown id.
    double score(const std::vector<std::string>& query_terms, UnitId id) const;

    /// Every document is ranked, including zero scores; ties go to the
    /// smaller id. k larger than the index returns all documents with
    /// `clamped` set.
    TopK topk(std::string_view query_text, std::size_t k) const;
    TopK topk_terms(const std::vector<std::string>& query_terms, std::size_t k) const;

    void save(const std::filesystem::path& path) const;
    static LexicalIndex load(const std::filesystem::path& path);

    friend bool operator==(const LexicalIndex& a, const LexicalIndex& b) {
        return a.params_.k1 == b.params_.k1 && a.params_.b == b.params_.b && a.doc_ids_ == b.doc_ids_ &&
               a.doc_lens_ == b.doc_lens_ && a.postings_ == b.postings_;
    }

private:
    double term_weight(double idf, std::uint32_t tf, std::uint32_t dl) const;
    std::size_t position(UnitId id) const;
    void finish();

    Bm25Params params_;
    std::vector<UnitId> doc_ids_;
    std::vector<std::uint32_t> doc_lens_; // parallel to doc_ids_
    std::map<std::string, std::vector<Posting>, std::less<>> postings_;
    std::unordered_map<UnitId, std::size_t> positions_;
    double avg_doc_len_ = 0.0;
};

struct EmbeddingVector {
    std::vector<double> values;
    bool unit_norm = false;

    std::size_t dims() const noexcept { return values.size(); }
    double norm() const;
    /// Scales to unit length. Throws DataError for an all-zero vector.
    static EmbeddingVector normalized(std::vector<double> values);

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

/// dot(u, v) / (|u| |v|). Throws DataError on a dims mismatch or a zero vector.
double cosine_sim(const EmbeddingVector& u, const EmbeddingVector& v);

/// Exact cosine search over every entry.
class VectorIndex {
public:
    explicit VectorIndex(std::size_t dims = 0) : dims_(dims) {}

    /// Throws DataError on a dims mismatch, a zero vector or a repeated id.
    void add(UnitId id, EmbeddingVector v);

    std::size_t dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<UnitId>& ids() const noexcept { return ids_; }
    const std::vector<EmbeddingVector>& vectors() const noexcept { return vectors_; }

    TopK topk(const EmbeddingVector& query, std::size_t k) const;

    void save(const std::filesystem::path& path) const;
    static VectorIndex load(const std::filesystem::path& path);

    friend bool operator==(const VectorIndex& a, const VectorIndex& b) {
        return a.dims_ == b.dims_ && a.ids_ == b.ids_ && a.vectors_ == b.vectors_;
    }

private:
    std::size_t dims_;
    std::vector<UnitId> ids_;
    std::vector<EmbeddingVector> vectors_;
    std::vector<double> norms_;
    std::unordered_map<UnitId, std::size_t> positions_;
};

/// Last "::" component of a qualified name.
std::string unqualified_name(std::string_view name);

/// Maps unqualified function and class names to the units defining them.
class SymbolIndex {
public:
    struct Entry {
        UnitId unit_id = 0;
        std::string source_path;

        friend bool operator==(const Entry&, const Entry&) = default;
    };

    static SymbolIndex build(const std::vector<RetrievalUnit>& units);

    std::size_t name_count() const noexcept { return names_.size(); }
    std::size_t entry_count() const noexcept;
    /// Entries sorted by unit id; empty when the name is unknown.
    const std::vector<Entry>& lookup(std::string_view name) const;

    /// Picks among same-named definitions: longest common prefix of path
    /// components with query_path, then the smallest unit id.
    std::optional<UnitId> resolve(std::string_view name, std::string_view query_path) const;

    void save(const std::filesystem::path& path) const;
    static SymbolIndex load(const std::filesystem::path& path);

    friend bool operator==(const SymbolIndex&, const SymbolIndex&) = default;

private:
    std::map<std::string, std::vector<Entry>, std::less<>> names_;
};

/// Number of leading path components two '/'-separated paths share.
std::size_t common_path_prefix(std::string_view a, std::string_view b);

struct DependencyResult {
    std::vector<RetrievalResult> results; // call order, score 1.0
    std::size_t misses = 0;
};

/// One definition per resolvable call name, in call order. Repeated names
/// are considered once; unknown names count as misses.
DependencyResult dependency_retrieve(const SymbolIndex& symbols, const std::vector<CallSite>& calls,
                                     std::string_view query_path);

/// k ids drawn uniformly without replacement, ranked in draw order with
/// score 0. Throws DataError when k exceeds the number of ids.
std::vector<RetrievalResult> random_retrieve(const std::vector<UnitId>& ids, std::size_t k, std::uint64_t seed);

} // namespace coderag
