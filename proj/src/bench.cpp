#include "coderag/bench.hpp"

#include "coderag/error.hpp"
#include "coderag/sampling.hpp"
#include "parallel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <tuple>

namespace coderag {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

bool has_terms(const std::string& text) { return !tokenize_for_index(text).empty(); }

std::string fixed2(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw DataError("write failed on '" + path.string() + "'");
}

auto report_key(const EvalReport& r) { return std::make_tuple(r.strategy, r.k, r.corpus_fraction); }

} // namespace

// ---- retrieval context ----

Backends Backends::for_strategy(Strategy s) {
    Backends b;
    switch (s) {
    case Strategy::sim_bm25: b.lexical = true; break;
    case Strategy::sim_vector: b.vector = true; break;
    case Strategy::dependency: b.symbol = true; break;
    case Strategy::random: break;
    }
    return b;
}

RetrievalContext::RetrievalContext(std::vector<RetrievalUnit> units, std::optional<LexicalIndex> lexical,
                                   std::optional<VectorIndex> vectors, std::optional<SymbolIndex> symbols)
    : units_(std::make_shared<const std::vector<RetrievalUnit>>(std::move(units))),
      catalog_(*units_),
      lexical_(std::move(lexical)),
      vectors_(std::move(vectors)),
      symbols_(std::move(symbols)) {}

RetrievalContext RetrievalContext::build(std::vector<RetrievalUnit> units, Backends which,
                                         EmbeddingProvider* embedder, Bm25Params bm25, PreparationStats* prep) {
    if (units.empty()) throw DataError("no retrieval units");
    double embedding_ms = 0.0, indexing_ms = 0.0;
    std::optional<LexicalIndex> lexical;
    std::optional<VectorIndex> vectors;
    std::optional<SymbolIndex> symbols;

    if (which.lexical) {
        auto t0 = Clock::now();
        lexical = LexicalIndex::build(units, bm25);
        indexing_ms += ms_between(t0, Clock::now());
    }
    if (which.vector) {
        if (!embedder) throw DataError("the vector backend needs an embedding provider");
        std::vector<std::string> texts;
        std::vector<UnitId> ids;
        for (const auto& u : units) {
            if (!has_terms(u.content)) continue;
            texts.push_back(u.content);
            ids.push_back(u.id);
        }
        if (texts.size() < units.size()) {
            spdlog::info("{} units without index terms left out of the vector index", units.size() - texts.size());
        }
        auto t0 = Clock::now();
        auto embedded = embedder->embed_batch(texts);
        auto t1 = Clock::now();
        if (embedded.size() != texts.size()) throw ProtocolError("embedding provider returned the wrong count");
        VectorIndex vi(embedder->dims());
        for (std::size_t i = 0; i < ids.size(); ++i) vi.add(ids[i], std::move(embedded[i]));
        vectors = std::move(vi);
        auto t2 = Clock::now();
        embedding_ms += ms_between(t0, t1);
        indexing_ms += ms_between(t1, t2);
    }
    if (which.symbol) {
        auto t0 = Clock::now();
        symbols = SymbolIndex::build(units);
        indexing_ms += ms_between(t0, Clock::now());
    }
    if (prep) {
        prep->phase_ms["embedding"] = embedding_ms;
        prep->phase_ms["indexing"] = indexing_ms;
    }
    return RetrievalContext(std::move(units), std::move(lexical), std::move(vectors), std::move(symbols));
}

PreparationStats measure_preparation(const std::vector<RetrievalUnit>& units, std::string_view backend,
                                     EmbeddingProvider* embedder) {
    Backends b;
    if (backend == "bm25" || backend == "lexical") {
        b.lexical = true;
    } else if (backend == "vector") {
        b.vector = true;
    } else if (backend == "symbol") {
        b.symbol = true;
    } else {
        throw DataError("unknown index backend '" + std::string(backend) + "'");
    }
    PreparationStats prep;
    RetrievalContext::build(units, b, embedder, {}, &prep);
    return prep;
}

// ---- evaluation ----

void ExperimentConfig::validate() const {
    if (!(corpus_fraction > 0.0 && corpus_fraction <= 1.0)) throw DataError("corpus_fraction must be in (0, 1]");
    if (concurrency == 0) throw DataError("bench.concurrency must be at least 1");
    if (max_tokens < 1) throw DataError("bench.max_tokens must be at least 1");
    if (!(max_failure_rate >= 0.0 && max_failure_rate <= 1.0)) throw DataError("max_failure_rate must be in [0, 1]");
    prompt.validate();
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

LatencyStats summarize_latency(const std::vector<InstanceOutcome>& outcomes) {
    LatencyStats s;
    std::map<std::string, std::vector<double>> samples;
    for (const auto& o : outcomes) {
        if (o.record.failed) continue;
        ++s.count;
        for (const auto& phase : kPhases) {
            auto it = o.phase_ms.find(phase);
            samples[phase].push_back(it == o.phase_ms.end() ? 0.0 : it->second);
        }
    }
    for (const auto& [phase, v] : samples) {
        PhaseSummary ps;
        double sum = 0.0;
        for (double x : v) sum += x;
        ps.mean_ms = v.empty() ? 0.0 : sum / static_cast<double>(v.size());
        ps.p50_ms = percentile(v, 50);
        ps.p95_ms = percentile(v, 95);
        s.phases[phase] = ps;
    }
    return s;
}

namespace {

std::size_t clamp_k(std::size_t k, std::size_t available, Strategy s) {
    if (s == Strategy::dependency || k <= available) return k;
    spdlog::warn("k={} exceeds the {} available units; clamping", k, available);
    return available;
}

std::vector<RetrievalResult> retrieve(const ExperimentConfig& cfg, std::size_t k, const CompletionInstance& inst,
                                      const RetrievalContext& ctx, EmbeddingProvider* embedder,
                                      const Grammar& grammar, InstanceOutcome& o) {
    if (k == 0) return {};
    switch (cfg.retrieval.strategy) {
    case Strategy::sim_bm25: {
        auto t0 = Clock::now();
        auto top = ctx.lexical()->topk(inst.context, k);
        o.phase_ms["retrieve"] = ms_between(t0, Clock::now());
        return std::move(top.results);
    }
    case Strategy::sim_vector: {
        std::optional<EmbeddingVector> q;
        auto t0 = Clock::now();
        if (has_terms(inst.context)) q = std::move(embedder->embed_batch({inst.context}).at(0));
        auto t1 = Clock::now();
        std::vector<RetrievalResult> results;
        if (q) results = ctx.vectors()->topk(*q, k).results;
        o.phase_ms["embed_query"] = ms_between(t0, t1);
        o.phase_ms["retrieve"] = ms_between(t1, Clock::now());
        return results;
    }
    case Strategy::dependency: {
        auto t0 = Clock::now();
        auto dep = dependency_retrieve(*ctx.symbols(), grammar.extract_calls(inst.context), inst.source_path);
        o.phase_ms["retrieve"] = ms_between(t0, Clock::now());
        o.dependency_misses = dep.misses;
        if (dep.results.size() > k) dep.results.resize(k);
        return std::move(dep.results);
    }
    case Strategy::random: {
        auto t0 = Clock::now();
        auto r = random_retrieve(ctx.catalog().ids(), k, derive_seed(cfg.retrieval.seed, inst.id));
        o.phase_ms["retrieve"] = ms_between(t0, Clock::now());
        return r;
    }
    }
    return {};
}

} // namespace

RunResult run_eval(const ExperimentConfig& cfg, const std::vector<CompletionInstance>& benchmark,
                   const RetrievalContext& ctx, CompletionProvider& completer, EmbeddingProvider* embedder,
                   const Grammar& grammar, const Tokenizer& tokenizer) {
    cfg.validate();
    if (benchmark.empty()) throw DataError("empty benchmark");
    const Strategy strategy = cfg.retrieval.strategy;
    const std::size_t k = clamp_k(cfg.retrieval.k, ctx.catalog().size(), strategy);
    if (k > 0) {
        const auto need = Backends::for_strategy(strategy);
        if ((need.lexical && !ctx.lexical()) || (need.vector && !ctx.vectors()) || (need.symbol && !ctx.symbols())) {
            throw DataError("strategy " + std::string(to_string(strategy)) + " needs an index that was not built");
        }
        if (need.vector && !embedder) throw DataError("strategy sim_vector needs an embedding provider");
    }

    std::vector<const CompletionInstance*> order;
    order.reserve(benchmark.size());
    for (const auto& inst : benchmark) order.push_back(&inst);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (order[i]->id == order[i - 1]->id) throw DataError("duplicate instance id " + std::to_string(order[i]->id));
    }

    const std::size_t n = order.size();
    const auto allowed_failures = static_cast<std::size_t>(std::floor(cfg.max_failure_rate * static_cast<double>(n)));
    std::vector<InstanceOutcome> outcomes(n);
    std::atomic<std::size_t> failures{0};
    std::atomic<bool> gave_up{false};

    const auto wall_start = Clock::now();
    detail::parallel_for(n, cfg.concurrency, [&](std::size_t i) {
        const auto& inst = *order[i];
        InstanceOutcome& o = outcomes[i];
        o.strategy = std::string(to_string(strategy));
        o.k = k;
        o.corpus_fraction = cfg.corpus_fraction;
        for (const auto& phase : kPhases) o.phase_ms[phase] = 0.0;
        auto fail = [&](const std::string& why) {
            o.record = EvalRecord{};
            o.record.instance_id = inst.id;
            o.record.target = inst.target;
            o.record.failed = true;
            o.record.error = why;
            if (failures.fetch_add(1) + 1 > allowed_failures) gave_up = true;
        };
        if (gave_up) {
            fail("skipped after too many failures");
            return;
        }
        try {
            auto results = retrieve(cfg, k, inst, ctx, embedder, grammar, o);

            auto t0 = Clock::now();
            PromptBundle bundle = strategy == Strategy::dependency
                                      ? assemble_dependency_prompt(results, ctx.catalog(), inst.context, cfg.prompt,
                                                                   tokenizer)
                                      : assemble_similarity_prompt(results, ctx.catalog(), inst.context, cfg.prompt,
                                                                   tokenizer);
            o.phase_ms["assemble"] = ms_between(t0, Clock::now());
            o.included_unit_ids = bundle.included_unit_ids;
            o.prompt_tokens = bundle.prompt_token_count;
            o.query_tokens = tokenizer.count(bundle.query_text);
            o.truncated = bundle.truncated;

            CompletionRequest req{bundle.prompt_text, cfg.max_tokens, 0.0, cfg.stop};
            auto t1 = Clock::now();
            auto resp = completer.complete(req);
            o.phase_ms["complete"] = ms_between(t1, Clock::now());
            o.completion_tokens = resp.completion_tokens;
            o.record = score_prediction(inst.id, truncate_to_first_line(resp.text), inst.target, tokenizer);
        } catch (const ProviderError& e) {
            spdlog::warn("instance {} failed: {}", inst.id, e.what());
            fail(e.what());
        }
    });
    const double wall_ms = ms_between(wall_start, Clock::now());

    const std::size_t n_failed = failures.load();
    if (n_failed > allowed_failures) {
        throw QualityGateError(std::to_string(n_failed) + " of " + std::to_string(n) +
                               " instances failed, above the allowed rate of " + fixed2(100 * cfg.max_failure_rate) +
                               "%");
    }

    RunResult run;
    std::vector<EvalRecord> records;
    records.reserve(n);
    double prompt_sum = 0.0;
    for (const auto& o : outcomes) {
        records.push_back(o.record);
        if (o.record.failed) continue;
        run.throughput.total_prompt_tokens += o.prompt_tokens;
        run.throughput.total_completion_tokens += o.completion_tokens;
        prompt_sum += static_cast<double>(o.prompt_tokens);
    }
    run.report = aggregate(records, std::string(to_string(strategy)), k, cfg.corpus_fraction);
    run.prompt_tokens_mean = prompt_sum / static_cast<double>(run.report.n_instances);
    run.throughput.wall_ms = wall_ms;
    run.throughput.tokens_per_second =
        wall_ms > 0.0 ? static_cast<double>(run.throughput.total_prompt_tokens + run.throughput.total_completion_tokens) /
                            (wall_ms / 1000.0)
                      : 0.0;
    run.latency = summarize_latency(outcomes);
    run.outcomes = std::move(outcomes);
    return run;
}

std::vector<RunResult> sweep_topk(const ExperimentConfig& cfg, const std::vector<std::size_t>& ks,
                                  const std::vector<CompletionInstance>& benchmark, const RetrievalContext& ctx,
                                  CompletionProvider& completer, EmbeddingProvider* embedder) {
    if (ks.empty()) throw DataError("no k values to sweep");
    std::vector<RunResult> out;
    for (std::size_t k : ks) {
        ExperimentConfig c = cfg;
        c.retrieval.k = k;
        out.push_back(run_eval(c, benchmark, ctx, completer, embedder));
    }
    return out;
}

std::vector<std::string> subset_paths(std::vector<std::string> paths, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw DataError("corpus fraction must be in (0, 1]");
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
    const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(paths.size())));
    if (keep == 0) throw DataError("corpus fraction " + fixed2(fraction) + " selects no files");
    auto perm = seeded_permutation(paths.size(), seed);
    std::vector<std::string> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.push_back(paths[perm[i]]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<RunResult> sweep_scale(const ExperimentConfig& cfg, const std::vector<double>& fractions,
                                   const std::vector<RetrievalUnit>& units,
                                   const std::vector<CompletionInstance>& benchmark, CompletionProvider& completer,
                                   EmbeddingProvider* embedder, std::uint64_t seed) {
    if (fractions.empty()) throw DataError("no corpus fractions to sweep");
    std::vector<std::string> paths;
    for (const auto& u : units) paths.push_back(u.source_path);
    std::vector<RunResult> out;
    for (double f : fractions) {
        auto chosen = subset_paths(paths, f, seed);
        std::set<std::string, std::less<>> keep(chosen.begin(), chosen.end());
        std::vector<RetrievalUnit> sub;
        for (const auto& u : units) {
            if (keep.contains(u.source_path)) sub.push_back(u);
        }
        auto ctx = RetrievalContext::build(std::move(sub), Backends::for_strategy(cfg.retrieval.strategy), embedder);
        ExperimentConfig c = cfg;
        c.corpus_fraction = f;
        out.push_back(run_eval(c, benchmark, ctx, completer, embedder));
    }
    return out;
}

// ---- output ----

json record_to_json(const InstanceOutcome& o, bool with_latencies) {
    json j = {{"instance_id", o.record.instance_id},
              {"strategy", o.strategy},
              {"k", o.k},
              {"corpus_fraction", o.corpus_fraction},
              {"included_unit_ids", o.included_unit_ids},
              {"prompt_tokens", o.prompt_tokens},
              {"query_tokens", o.query_tokens},
              {"completion_tokens", o.completion_tokens},
              {"truncated", o.truncated},
              {"prediction", o.record.prediction},
              {"target", o.record.target},
              {"em", o.record.em},
              {"es", o.record.es},
              {"bleu", o.record.bleu},
              {"failed", o.record.failed}};
    if (o.record.failed) j["error"] = o.record.error;
    if (with_latencies) j["phase_latencies_ms"] = o.phase_ms;
    return j;
}

void write_records(const std::filesystem::path& records_path, const std::vector<const RunResult*>& runs,
                   TimingLog timing, const std::filesystem::path& timings_path) {
    std::string records, timings;
    for (const auto* run : runs) {
        for (const auto& o : run->outcomes) {
            records += record_to_json(o, timing == TimingLog::inline_).dump();
            records += '\n';
            if (timing == TimingLog::separate) {
                timings += json{{"instance_id", o.record.instance_id},
                                {"strategy", o.strategy},
                                {"k", o.k},
                                {"corpus_fraction", o.corpus_fraction},
                                {"phase_latencies_ms", o.phase_ms}}
                               .dump();
                timings += '\n';
            }
        }
    }
    write_text(records_path, records);
    if (timing == TimingLog::separate && !timings_path.empty()) write_text(timings_path, timings);
}

std::string render_report_csv(std::vector<EvalReport> reports) {
    std::stable_sort(reports.begin(), reports.end(), [](auto& a, auto& b) { return report_key(a) < report_key(b); });
    std::string out = "strategy,k,corpus_fraction,n,n_failed,em_pct,es_pct,bleu_pct\n";
    for (const auto& r : reports) {
        out += csv_field(r.strategy) + "," + std::to_string(r.k) + "," + fixed2(r.corpus_fraction) + "," +
               std::to_string(r.n_instances) + "," + std::to_string(r.n_failed) + "," + fixed2(r.em_pct) + "," +
               fixed2(r.es_pct) + "," + fixed2(r.bleu_pct) + "\n";
    }
    return out;
}

json render_report_json(std::vector<EvalReport> reports) {
    std::stable_sort(reports.begin(), reports.end(), [](auto& a, auto& b) { return report_key(a) < report_key(b); });
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return arr;
}

void emit_report(const std::vector<EvalReport>& reports, const std::filesystem::path& path, ReportFormat format) {
    if (reports.empty()) throw DataError("no reports to write");
    write_text(path, format == ReportFormat::csv ? render_report_csv(reports) : render_report_json(reports).dump(2) + "\n");
}

void emit_efficiency(const std::vector<const RunResult*>& runs, const std::filesystem::path& path,
                     ReportFormat format) {
    if (runs.empty()) throw DataError("no runs to write");
    std::vector<const RunResult*> sorted = runs;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](auto* a, auto* b) { return report_key(a->report) < report_key(b->report); });
    if (format == ReportFormat::csv) {
        std::string out = "strategy,k,corpus_fraction,n,prompt_tokens_mean,tokens_per_second,wall_ms";
        for (const auto& phase : kPhases) out += "," + phase + "_mean_ms," + phase + "_p50_ms," + phase + "_p95_ms";
        out += "\n";
        for (const auto* r : sorted) {
            out += csv_field(r->report.strategy) + "," + std::to_string(r->report.k) + "," +
                   fixed2(r->report.corpus_fraction) + "," + std::to_string(r->report.n_instances) + "," +
                   fixed2(r->prompt_tokens_mean) + "," + fixed2(r->throughput.tokens_per_second) + "," +
                   fixed2(r->throughput.wall_ms);
            for (const auto& phase : kPhases) {
                auto it = r->latency.phases.find(phase);
                PhaseSummary ps = it == r->latency.phases.end() ? PhaseSummary{} : it->second;
                out += "," + fixed2(ps.mean_ms) + "," + fixed2(ps.p50_ms) + "," + fixed2(ps.p95_ms);
            }
            out += "\n";
        }
        write_text(path, out);
        return;
    }
    json arr = json::array();
    for (const auto* r : sorted) {
        json phases = json::object();
        for (const auto& [phase, ps] : r->latency.phases) {
            phases[phase] = {{"mean_ms", round2(ps.mean_ms)}, {"p50_ms", round2(ps.p50_ms)}, {"p95_ms", round2(ps.p95_ms)}};
        }
        arr.push_back({{"strategy", r->report.strategy},
                       {"k", r->report.k},
                       {"corpus_fraction", r->report.corpus_fraction},
                       {"n", r->report.n_instances},
                       {"prompt_tokens_mean", round2(r->prompt_tokens_mean)},
                       {"total_prompt_tokens", r->throughput.total_prompt_tokens},
                       {"total_completion_tokens", r->throughput.total_completion_tokens},
                       {"wall_ms", round2(r->throughput.wall_ms)},
                       {"tokens_per_second", round2(r->throughput.tokens_per_second)},
                       {"latency", phases}});
    }
    write_text(path, arr.dump(2) + "\n");
}

} // namespace coderag
