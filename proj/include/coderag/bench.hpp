#pragma once

#include "coderag/corpus.hpp"
#include "coderag/metrics.hpp"
#include "coderag/prompt.hpp"
#include "coderag/providers.hpp"
#include "coderag/retrieval.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace coderag {

struct PreparationStats {
    std::map<std::string, double> phase_ms; // "embedding", "indexing"
};

struct Backends {
    bool lexical = false;
    bool vector = false;
    bool symbol = false;

    static Backends for_strategy(Strategy s);
};

/// Units plus whichever indexes a run needs. Copies share the units.
class RetrievalContext {
public:
    RetrievalContext() = default;
    RetrievalContext(std::vector<RetrievalUnit> units, std::optional<LexicalIndex> lexical,
                     std::optional<VectorIndex> vectors, std::optional<SymbolIndex> symbols);

    /// Builds the requested indexes and records how long each phase took.
    /// The vector index needs an embedder; units without index terms are
    /// left out of it.
    static RetrievalContext build(std::vector<RetrievalUnit> units, Backends which,
                                  EmbeddingProvider* embedder = nullptr, Bm25Params bm25 = {},
                                  PreparationStats* prep = nullptr);

    const std::vector<RetrievalUnit>& units() const { return *units_; }
    const UnitCatalog& catalog() const { return catalog_; }
    const LexicalIndex* lexical() const { return lexical_ ? &*lexical_ : nullptr; }
    const VectorIndex* vectors() const { return vectors_ ? &*vectors_ : nullptr; }
    const SymbolIndex* symbols() const { return symbols_ ? &*symbols_ : nullptr; }

private:
    std::shared_ptr<const std::vector<RetrievalUnit>> units_ = std::make_shared<std::vector<RetrievalUnit>>();
    UnitCatalog catalog_;
    std::optional<LexicalIndex> lexical_;
    std::optional<VectorIndex> vectors_;
    std::optional<SymbolIndex> symbols_;
};

/// Embedding and indexing time for one backend. The lexical backend does
/// no embedding, so its embedding phase is exactly 0.
PreparationStats measure_preparation(const std::vector<RetrievalUnit>& units, std::string_view backend,
                                     EmbeddingProvider* embedder = nullptr);

struct ExperimentConfig {
    RetrievalConfig retrieval;   // strategy, k (0 = no retrieval), seed
    double corpus_fraction = 1.0;
    std::size_t concurrency = 1;
    PromptConfig prompt;
    int max_tokens = 512;
    std::vector<std::string> stop;
    double max_failure_rate = 0.05;

    /// Throws DataError on out-of-range fields.
    void validate() const;
};

inline const std::vector<std::string> kPhases = {"embed_query", "retrieve", "assemble", "complete"};

struct InstanceOutcome {
    EvalRecord record;
    std::string strategy;
    std::size_t k = 0;
    double corpus_fraction = 1.0;
    std::vector<UnitId> included_unit_ids;
    std::size_t prompt_tokens = 0;
    std::size_t query_tokens = 0;
    std::size_t completion_tokens = 0;
    bool truncated = false;
    std::size_t dependency_misses = 0;
    std::map<std::string, double> phase_ms;
};

struct PhaseSummary {
    double mean_ms = 0.0;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
};

struct LatencyStats {
    std::map<std::string, PhaseSummary> phases;
    std::size_t count = 0;
};

/// Nearest-rank percentile (p in (0, 100]) of an unsorted sample.
double percentile(std::vector<double> values, double p);

LatencyStats summarize_latency(const std::vector<InstanceOutcome>& outcomes);

struct ThroughputStats {
    std::size_t total_prompt_tokens = 0;
    std::size_t total_completion_tokens = 0;
    double wall_ms = 0.0;
    double tokens_per_second = 0.0; // (prompt + completion tokens) / wall seconds
};

struct RunResult {
    EvalReport report;
    LatencyStats latency;
    ThroughputStats throughput;
    std::vector<InstanceOutcome> outcomes; // instance_id order
    double prompt_tokens_mean = 0.0;
};

/// Retrieve, assemble, complete, keep the first line, score. Outcomes come
/// back in instance_id order whatever the concurrency. Provider failures
/// mark an instance failed; a failure rate above cfg.max_failure_rate
/// throws QualityGateError.
RunResult run_eval(const ExperimentConfig& cfg, const std::vector<CompletionInstance>& benchmark,
                   const RetrievalContext& ctx, CompletionProvider& completer,
                   EmbeddingProvider* embedder = nullptr, const Grammar& grammar = default_grammar(),
                   const Tokenizer& tokenizer = default_tokenizer());

/// One run per k. A k above the number of units is clamped with a warning.
std::vector<RunResult> sweep_topk(const ExperimentConfig& cfg, const std::vector<std::size_t>& ks,
                                  const std::vector<CompletionInstance>& benchmark, const RetrievalContext& ctx,
                                  CompletionProvider& completer, EmbeddingProvider* embedder = nullptr);

/// Source paths kept at a corpus fraction: the first llround(f * n) paths
/// of a seeded permutation, returned sorted. Smaller fractions are
/// prefixes of larger ones. Throws DataError for f outside (0, 1] or an
/// empty subset.
std::vector<std::string> subset_paths(std::vector<std::string> paths, double fraction, std::uint64_t seed);

/// Rebuilds the retrieval context from the units of each subset and runs
/// the experiment. Unit ids are kept, so fraction 1.0 matches a full run.
std::vector<RunResult> sweep_scale(const ExperimentConfig& cfg, const std::vector<double>& fractions,
                                   const std::vector<RetrievalUnit>& units,
                                   const std::vector<CompletionInstance>& benchmark, CompletionProvider& completer,
                                   EmbeddingProvider* embedder = nullptr, std::uint64_t seed = 0);

enum class TimingLog { separate, inline_ };

nlohmann::json record_to_json(const InstanceOutcome& o, bool with_latencies);

/// Writes one JSON line per outcome. With TimingLog::separate the records
/// carry no wall-clock fields (so reruns are byte-identical) and the
/// latencies go to timings_path keyed by instance_id.
void write_records(const std::filesystem::path& records_path, const std::vector<const RunResult*>& runs,
                   TimingLog timing, const std::filesystem::path& timings_path = {});

enum class ReportFormat { csv, json };

/// Effectiveness table sorted by (strategy, k, corpus_fraction), floats at
/// two decimals.
void emit_report(const std::vector<EvalReport>& reports, const std::filesystem::path& path, ReportFormat format);
std::string render_report_csv(std::vector<EvalReport> reports);
nlohmann::json render_report_json(std::vector<EvalReport> reports);

/// Latency and throughput companion table (client-observed timings).
void emit_efficiency(const std::vector<const RunResult*>& runs, const std::filesystem::path& path,
                     ReportFormat format);

} // namespace coderag
