#include "coderag/bench.hpp"
#include "coderag/charts.hpp"
#include "coderag/config.hpp"
#include "coderag/corpus.hpp"
#include "coderag/error.hpp"
#include "coderag/protocol.hpp"
#include "coderag/store.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;
using namespace coderag;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitProvider = 2;
constexpr int kExitQuality = 3;
constexpr int kExitUsage = 64;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    bool print_config = false;
    bool mock_providers = false;
    bool verbose = false;
    // flag name -> config key, filled by bind()
    std::vector<std::pair<std::string, std::string>> flag_values;
};

/// Adds a flag that is a shortcut for a config key. Its value is applied
/// after the config file and --set overrides.
void bind(CLI::App* cmd, Options& opts, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&opts, key](const std::string& v) { opts.flag_values.emplace_back(key, v); }, help + " [" + key + "]");
}

AppConfig effective_config(const Options& opts) {
    AppConfig cfg = opts.config_path.empty() ? AppConfig{} : load_config(opts.config_path);
    for (const auto& o : opts.overrides) cfg.apply_override(o);
    for (const auto& [key, value] : opts.flag_values) cfg.set(key, value);
    if (opts.mock_providers) cfg.providers.mock = true;
    cfg.validate();
    return cfg;
}

std::unique_ptr<EmbeddingProvider> make_embedder(const AppConfig& cfg) {
    if (cfg.providers.mock) return std::make_unique<MockEmbeddingProvider>(cfg.providers.embed.dims, cfg.providers.embed.mock_seed);
    return std::make_unique<HttpEmbeddingProvider>(cfg.providers.embed);
}

std::shared_ptr<CompletionProvider> make_completer(const AppConfig& cfg) {
    if (!cfg.providers.mock) return std::make_shared<HttpCompletionProvider>(cfg.providers.complete);
    std::shared_ptr<CompletionProvider> p;
    if (cfg.providers.mock_completion == "constant") {
        p = std::make_shared<ConstantCompletionProvider>(cfg.providers.mock_constant_text);
    } else {
        CopyOracleConfig oc;
        oc.window = cfg.corpus.window;
        oc.match_lines = cfg.providers.mock_match_lines;
        p = std::make_shared<CopyOracleCompletionProvider>(oc);
    }
    const auto& lm = cfg.providers.mock_latency;
    if (lm.base_ms > 0 || lm.per_prompt_token_ms > 0 || lm.per_prompt_token_sq_ms > 0 || lm.per_completion_token_ms > 0) {
        p = std::make_shared<LatencyModelCompletionProvider>(p, lm);
    }
    return p;
}

ExperimentConfig experiment(const AppConfig& cfg) {
    ExperimentConfig e;
    e.retrieval.strategy = cfg.retrieval.strategy;
    e.retrieval.k = cfg.retrieval.k;
    e.retrieval.seed = cfg.retrieval.seed;
    e.concurrency = cfg.bench.concurrency;
    e.prompt = cfg.prompt;
    e.max_tokens = cfg.bench.max_tokens;
    e.max_failure_rate = cfg.bench.max_failure_rate;
    return e;
}

std::string fmt2(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

std::string backend_file(const std::string& backend) { return backend + ".index.jsonl"; }

/// Loads the indexes a strategy needs from the store directory, building
/// whatever is missing.
RetrievalContext load_context(const fs::path& store, Strategy strategy, const AppConfig& cfg,
                              EmbeddingProvider* embedder) {
    auto units = read_unit_store(store / "units.jsonl");
    if (units.empty()) throw DataError("unit store '" + (store / "units.jsonl").string() + "' is empty");
    const auto need = Backends::for_strategy(strategy);
    std::optional<LexicalIndex> lexical;
    std::optional<VectorIndex> vectors;
    std::optional<SymbolIndex> symbols;
    Backends missing;
    if (need.lexical) {
        if (fs::exists(store / backend_file("bm25"))) lexical = LexicalIndex::load(store / backend_file("bm25"));
        else missing.lexical = true;
    }
    if (need.vector) {
        if (fs::exists(store / backend_file("vector"))) vectors = VectorIndex::load(store / backend_file("vector"));
        else missing.vector = true;
    }
    if (need.symbol) {
        if (fs::exists(store / backend_file("symbol"))) symbols = SymbolIndex::load(store / backend_file("symbol"));
        else missing.symbol = true;
    }
    if (missing.lexical || missing.vector || missing.symbol) {
        auto built = RetrievalContext::build(units, missing, embedder, cfg.retrieval.bm25);
        if (missing.lexical) lexical = *built.lexical();
        if (missing.vector) vectors = *built.vectors();
        if (missing.symbol) symbols = *built.symbols();
    }
    return RetrievalContext(std::move(units), std::move(lexical), std::move(vectors), std::move(symbols));
}

void print_report(const RunResult& r) {
    std::cout << r.report.strategy << " k=" << r.report.k << " fraction=" << fmt2(r.report.corpus_fraction)
              << " n=" << r.report.n_instances << " failed=" << r.report.n_failed << " EM=" << fmt2(r.report.em_pct)
              << " ES=" << fmt2(r.report.es_pct) << " BLEU=" << fmt2(r.report.bleu_pct)
              << " prompt_tokens=" << fmt2(r.prompt_tokens_mean)
              << " tokens/s=" << fmt2(r.throughput.tokens_per_second) << "\n";
}

void write_outputs(const fs::path& out, const std::vector<const RunResult*>& runs, const AppConfig& cfg) {
    fs::create_directories(out);
    write_records(out / "records.jsonl", runs, cfg.bench.timing_log, out / "timings.jsonl");
    std::vector<EvalReport> reports;
    for (const auto* r : runs) reports.push_back(r->report);
    emit_report(reports, out / "report.csv", ReportFormat::csv);
    emit_report(reports, out / "report.json", ReportFormat::json);
    emit_efficiency(runs, out / "efficiency.csv", ReportFormat::csv);
    emit_efficiency(runs, out / "efficiency.json", ReportFormat::json);
}

// ---- subcommands ----

int cmd_ingest(const AppConfig& cfg, const fs::path& out) {
    if (cfg.corpus.root.empty()) throw UsageError("ingest needs a source root");
    auto result = ingest(cfg.corpus.root, cfg.corpus.filter);
    const auto& rep = result.report;
    std::cout << "scanned " << rep.total_scanned() << " files: kept=" << rep.kept
              << " removed_duplicate=" << rep.removed_duplicate << " removed_generated=" << rep.removed_generated
              << " removed_comment_heavy=" << rep.removed_comment_heavy
              << " removed_long_define=" << rep.removed_long_define << " removed_unreadable=" << rep.removed_unreadable
              << "\n";
    if (result.files.empty()) throw DataError("no files");
    fs::create_directories(out);
    const auto tok = default_tokenizer().id();
    std::vector<SourceFile> retrieval = std::move(result.files);
    if (cfg.corpus.test_fraction > 0.0) {
        auto split = split_corpus(retrieval, cfg.corpus.test_fraction, cfg.corpus.seed);
        write_file_store(out / "test_files.jsonl", split.test, tok);
        std::cout << "holdout: " << split.test.size() << " test files, " << split.retrieval.size()
                  << " retrieval files\n";
        retrieval = std::move(split.retrieval);
    }
    write_file_store(out / "files.jsonl", retrieval, tok);
    auto units = segment_corpus(retrieval);
    write_unit_store(out / "units.jsonl", units, tok);
    write_json_file(out / "filter_report.json", {{"kept", rep.kept},
                                                 {"removed_duplicate", rep.removed_duplicate},
                                                 {"removed_generated", rep.removed_generated},
                                                 {"removed_comment_heavy", rep.removed_comment_heavy},
                                                 {"removed_long_define", rep.removed_long_define},
                                                 {"removed_unreadable", rep.removed_unreadable}});
    std::cout << "wrote " << retrieval.size() << " files and " << units.size() << " units to " << out.string() << "\n";
    return kExitOk;
}

int cmd_index(const AppConfig& cfg, const fs::path& store, const std::string& backend) {
    auto units = read_unit_store(store / "units.jsonl");
    if (units.empty()) throw DataError("unit store is empty");
    Backends b;
    if (backend == "bm25") b.lexical = true;
    else if (backend == "vector") b.vector = true;
    else if (backend == "symbol") b.symbol = true;
    else throw UsageError("unknown backend '" + backend + "' (bm25, vector, symbol)");
    std::unique_ptr<EmbeddingProvider> embedder;
    if (b.vector) embedder = make_embedder(cfg);
    PreparationStats prep;
    auto ctx = RetrievalContext::build(units, b, embedder.get(), cfg.retrieval.bm25, &prep);
    const auto path = store / backend_file(backend);
    if (b.lexical) {
        ctx.lexical()->save(path);
        std::cout << "bm25 index: N=" << ctx.lexical()->doc_count() << " terms=" << ctx.lexical()->term_count()
                  << " avg_doc_len=" << fmt2(ctx.lexical()->avg_doc_len()) << "\n";
    } else if (b.vector) {
        ctx.vectors()->save(path);
        std::cout << "vector index: entries=" << ctx.vectors()->size() << " dims=" << ctx.vectors()->dims() << "\n";
    } else {
        ctx.symbols()->save(path);
        std::cout << "symbol index: names=" << ctx.symbols()->name_count()
                  << " definitions=" << ctx.symbols()->entry_count() << "\n";
    }
    std::cout << "preparation: embedding_ms=" << fmt2(prep.phase_ms["embedding"])
              << " indexing_ms=" << fmt2(prep.phase_ms["indexing"]) << "\n";
    std::cout << "wrote " << path.string() << "\n";
    return kExitOk;
}

int cmd_bench_make(const AppConfig& cfg, const fs::path& files_path, const fs::path& out) {
    auto files = read_file_store(files_path);
    BenchmarkOptions opt;
    opt.window = cfg.corpus.window;
    opt.stride = cfg.corpus.stride;
    if (cfg.corpus.sample > 0) opt.sample = SampleSpec{cfg.corpus.sample, cfg.corpus.seed};
    BenchmarkStats stats;
    auto instances = make_benchmark(files, opt, default_tokenizer(), &stats);
    std::cout << stats.candidates << " candidates, filtered blank=" << stats.filtered_blank
              << " single_symbol=" << stats.filtered_single_symbol << " comment=" << stats.filtered_comment << ", "
              << stats.after_filter << " after filtering\n";
    if (instances.empty()) throw DataError("zero benchmark instances");
    write_benchmark_store(out, instances, default_tokenizer().id(), opt.window, opt.stride);
    std::cout << instances.size() << " instances\n";
    return kExitOk;
}

int cmd_eval(const AppConfig& cfg, const fs::path& store, const fs::path& bench_path, const fs::path& out) {
    auto bench = read_benchmark_store(bench_path);
    auto embedder = cfg.retrieval.strategy == Strategy::sim_vector ? make_embedder(cfg) : nullptr;
    auto ctx = load_context(store, cfg.retrieval.strategy, cfg, embedder.get());
    auto completer = make_completer(cfg);
    auto run = run_eval(experiment(cfg), bench.instances, ctx, *completer, embedder.get());
    print_report(run);
    write_outputs(out, {&run}, cfg);
    return kExitOk;
}

int cmd_sweep(const AppConfig& cfg, const fs::path& store, const fs::path& bench_path, const fs::path& out,
              bool scale) {
    auto bench = read_benchmark_store(bench_path);
    auto embedder = cfg.retrieval.strategy == Strategy::sim_vector ? make_embedder(cfg) : nullptr;
    auto ctx = load_context(store, cfg.retrieval.strategy, cfg, embedder.get());
    auto completer = make_completer(cfg);
    auto exp = experiment(cfg);
    auto topk = sweep_topk(exp, cfg.bench.ks, bench.instances, ctx, *completer, embedder.get());
    std::vector<RunResult> scaled;
    if (scale) {
        scaled = sweep_scale(exp, cfg.bench.fractions, ctx.units(), bench.instances, *completer, embedder.get(),
                             cfg.bench.scale_seed);
    }
    std::vector<const RunResult*> all, topk_ptrs, scale_ptrs;
    for (const auto& r : topk) {
        print_report(r);
        all.push_back(&r);
        topk_ptrs.push_back(&r);
    }
    for (const auto& r : scaled) {
        print_report(r);
        all.push_back(&r);
        scale_ptrs.push_back(&r);
    }
    write_outputs(out, all, cfg);
    std::vector<const RunResult*> chart_topk = topk_ptrs.size() >= 2 ? topk_ptrs : std::vector<const RunResult*>{};
    std::vector<const RunResult*> chart_scale = scale_ptrs.size() >= 2 ? scale_ptrs : std::vector<const RunResult*>{};
    if (!chart_topk.empty() || !chart_scale.empty()) {
        for (const auto& p : emit_charts(out / "charts", chart_topk, chart_scale)) {
            std::cout << "chart " << p.string() << "\n";
        }
    }
    return kExitOk;
}

/// Rebuilds reports and charts from a records.jsonl file.
int cmd_report(const fs::path& dir, const std::string& format) {
    std::ifstream in(dir / "records.jsonl", std::ios::binary);
    if (!in) throw DataError("cannot read '" + (dir / "records.jsonl").string() + "'");
    using Key = std::tuple<std::string, std::size_t, double>;
    std::map<Key, RunResult> runs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = protocol::parse_body(line);
        Key key{j.at("strategy").get<std::string>(), j.at("k").get<std::size_t>(), j.at("corpus_fraction").get<double>()};
        InstanceOutcome o;
        o.strategy = std::get<0>(key);
        o.k = std::get<1>(key);
        o.corpus_fraction = std::get<2>(key);
        o.record.instance_id = j.at("instance_id").get<InstanceId>();
        o.record.prediction = j.value("prediction", "");
        o.record.target = j.value("target", "");
        o.record.em = j.at("em").get<int>();
        o.record.es = j.at("es").get<double>();
        o.record.bleu = j.at("bleu").get<double>();
        o.record.failed = j.value("failed", false);
        o.prompt_tokens = j.value("prompt_tokens", std::size_t{0});
        runs[key].outcomes.push_back(std::move(o));
    }
    if (runs.empty()) throw DataError("no records in '" + (dir / "records.jsonl").string() + "'");
    std::vector<EvalReport> reports;
    for (auto& [key, run] : runs) {
        std::vector<EvalRecord> recs;
        double prompt_sum = 0.0;
        for (const auto& o : run.outcomes) {
            recs.push_back(o.record);
            if (!o.record.failed) prompt_sum += static_cast<double>(o.prompt_tokens);
        }
        run.report = aggregate(recs, std::get<0>(key), std::get<1>(key), std::get<2>(key));
        run.prompt_tokens_mean = prompt_sum / static_cast<double>(run.report.n_instances);
        reports.push_back(run.report);
    }
    const auto fmt = format == "json" ? ReportFormat::json : ReportFormat::csv;
    const auto path = dir / (format == "json" ? "report.json" : "report.csv");
    emit_report(reports, path, fmt);
    std::cout << "wrote " << path.string() << "\n";

    // K series: runs at fraction 1.0; fraction series: runs sharing one k.
    std::vector<const RunResult*> topk, scale;
    for (const auto& [key, run] : runs) {
        if (std::get<2>(key) == 1.0) topk.push_back(&run);
    }
    std::map<std::pair<std::string, std::size_t>, std::vector<const RunResult*>> by_k;
    for (const auto& [key, run] : runs) by_k[{std::get<0>(key), std::get<1>(key)}].push_back(&run);
    for (const auto& [sk, list] : by_k) {
        if (list.size() >= 2) scale.insert(scale.end(), list.begin(), list.end());
    }
    std::map<std::string, std::size_t> ks_per_strategy;
    for (const auto* r : topk) ++ks_per_strategy[r->report.strategy];
    std::erase_if(topk, [&](const RunResult* r) { return ks_per_strategy[r->report.strategy] < 2; });
    if (!topk.empty() || !scale.empty()) {
        for (const auto& p : emit_charts(dir / "charts", topk, scale)) std::cout << "chart " << p.string() << "\n";
    }
    return kExitOk;
}

int cmd_ftprep(const fs::path& files_path, const fs::path& out, std::size_t seq_len) {
    if (seq_len == 0) throw UsageError("--seq-len must be positive");
    auto files = read_file_store(files_path);
    if (files.empty()) throw DataError("empty corpus");
    auto packed = pack_training_blocks(files, seq_len);
    write_training_blocks(out, packed, seq_len, default_tokenizer().id());
    std::cout << packed.total_tokens << " tokens, " << packed.blocks.size() << " blocks of " << seq_len
              << " tokens (" << packed.total_tokens - packed.blocks.size() * seq_len << " dropped)\n";
    return kExitOk;
}

int cmd_conformance(const AppConfig& cfg, const std::string& endpoint, const std::string& model, std::size_t dims) {
    protocol::ConformanceOptions o;
    o.endpoint = endpoint.empty() ? cfg.providers.embed.endpoint : endpoint;
    o.model = model;
    o.dims = dims;
    o.timeout_ms = cfg.providers.embed.timeout_ms;
    bool all = true;
    for (const auto& c : protocol::check_embedding_server(o)) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.passed) std::cout << ": " << c.detail;
        std::cout << "\n";
        all = all && c.passed;
    }
    return all ? kExitOk : kExitProvider;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Retrieval-augmented code completion toolkit: ingest, index, benchmark, evaluate."};
    app.require_subcommand(0, 1);
    Options opts;
    app.add_option("-c,--config", opts.config_path, "INI config file")->check(CLI::ExistingFile);
    app.add_option("--set", opts.overrides, "Override a config key: section.key=value (repeatable)");
    app.add_flag("--print-config", opts.print_config, "Print the effective configuration");
    app.add_flag("--mock-providers", opts.mock_providers, "Use in-process mock embedding and completion providers");
    app.add_flag("-v,--verbose", opts.verbose, "Debug logging");

    std::string out, store, files, bench, backend = "bm25", format = "csv", endpoint, model;
    std::size_t seq_len = 4096, dims = 0;
    bool scale = false;

    auto* ingest_cmd = app.add_subcommand("ingest", "Filter a source tree and write file and unit stores");
    bind(ingest_cmd, opts, "root", "corpus.root", "Source tree");
    ingest_cmd->add_option("-o,--out", out, "Output store directory")->required();
    bind(ingest_cmd, opts, "--test-fraction", "corpus.test_fraction", "Hold out this fraction of files for benchmarks");
    bind(ingest_cmd, opts, "--seed", "corpus.seed", "Holdout seed");

    auto* index_cmd = app.add_subcommand("index", "Build a retrieval index from a unit store");
    index_cmd->add_option("-s,--store", store, "Store directory")->required();
    index_cmd->add_option("-b,--backend", backend, "bm25, vector or symbol")
        ->check(CLI::IsMember({"bm25", "vector", "symbol"}));

    auto* make_cmd = app.add_subcommand("bench-make", "Build the sliding-window completion benchmark");
    make_cmd->add_option("-f,--files", files, "File store (files.jsonl)")->required();
    make_cmd->add_option("-o,--out", out, "Benchmark store to write")->required();
    bind(make_cmd, opts, "--window", "corpus.window", "Context lines");
    bind(make_cmd, opts, "--stride", "corpus.stride", "Window stride");
    bind(make_cmd, opts, "--sample", "corpus.sample", "Sample this many instances (0 = all)");
    bind(make_cmd, opts, "--seed", "corpus.seed", "Sampling seed");

    auto add_run_options = [&](CLI::App* cmd) {
        cmd->add_option("-s,--store", store, "Store directory with units.jsonl and indexes")->required();
        cmd->add_option("-B,--benchmark", bench, "Benchmark store")->required();
        cmd->add_option("-o,--out", out, "Output directory")->required();
        bind(cmd, opts, "--strategy", "retrieval.strategy", "sim-bm25, sim-vector, dependency or random");
        bind(cmd, opts, "--seed", "retrieval.seed", "Seed for random retrieval");
        bind(cmd, opts, "--concurrency", "bench.concurrency", "Parallel completion requests");
    };
    auto* eval_cmd = app.add_subcommand("eval", "Run one retrieval strategy over a benchmark");
    add_run_options(eval_cmd);
    bind(eval_cmd, opts, "--k", "retrieval.k", "Units retrieved per query");

    auto* sweep_cmd = app.add_subcommand("sweep", "Top-k sweep and optional corpus-scale sweep");
    add_run_options(sweep_cmd);
    bind(sweep_cmd, opts, "--k", "bench.ks", "K values, e.g. 0..5 or 0,1,5");
    bind(sweep_cmd, opts, "--k-fixed", "retrieval.k", "K used by the scale sweep");
    bind(sweep_cmd, opts, "--fractions", "bench.fractions", "Corpus fractions for the scale sweep");
    sweep_cmd->add_flag("--scale", scale, "Also run the corpus-scale sweep");

    auto* report_cmd = app.add_subcommand("report", "Rebuild reports and charts from a run directory");
    report_cmd->add_option("-i,--in", out, "Run directory containing records.jsonl")->required();
    report_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* ftprep_cmd = app.add_subcommand("ftprep", "Pack a file store into fixed-length training blocks");
    ftprep_cmd->add_option("-f,--files", files, "File store (files.jsonl)")->required();
    ftprep_cmd->add_option("-o,--out", out, "Block file to write")->required();
    ftprep_cmd->add_option("-L,--seq-len", seq_len, "Tokens per block");

    auto* conf_cmd = app.add_subcommand("conformance", "Check an embedding server against the wire protocol");
    conf_cmd->add_option("--endpoint", endpoint, "Server URL (default: providers.embed_endpoint)");
    conf_cmd->add_option("--model", model, "Expected model name (default: reported by /health)");
    conf_cmd->add_option("--dims", dims, "Expected dims (0 = any)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    spdlog::set_level(opts.verbose ? spdlog::level::debug : spdlog::level::warn);
    spdlog::set_pattern("%l: %v");
    try {
        if (ftprep_cmd->parsed() && seq_len == 0) throw UsageError("--seq-len must be positive");
        const AppConfig cfg = effective_config(opts);
        if (opts.print_config) std::cout << cfg.render();
        if (ingest_cmd->parsed()) return cmd_ingest(cfg, out);
        if (index_cmd->parsed()) return cmd_index(cfg, store, backend);
        if (make_cmd->parsed()) return cmd_bench_make(cfg, files, out);
        if (eval_cmd->parsed()) return cmd_eval(cfg, store, bench, out);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg, store, bench, out, scale);
        if (report_cmd->parsed()) return cmd_report(out, format);
        if (ftprep_cmd->parsed()) return cmd_ftprep(files, out, seq_len);
        if (conf_cmd->parsed()) return cmd_conformance(cfg, endpoint, model, dims);
        if (!opts.print_config) {
            std::cerr << app.help();
            return kExitUsage;
        }
        return kExitOk;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const QualityGateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitQuality;
    } catch (const ProviderError& e) {
        std::cerr << "error: provider: " << e.what() << "\n";
        return kExitProvider;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
