// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "coderag/bench.hpp"
#include "coderag/charts.hpp"
#include "coderag/corpus.hpp"
#include "coderag/metrics.hpp"
#include "coderag/prompt.hpp"
#include "coderag/providers.hpp"
#include "coderag/retrieval.hpp"
#include "coderag/sampling.hpp"
#include "coderag/store.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace coderag;

namespace {

// Tolerances and sizes.
constexpr int kRetrievalTrials = 200;
constexpr std::size_t kMaxUnits = 1000;
constexpr double kLexicalTol = 1e-9;
constexpr double kVectorTol = 1e-6;
constexpr double kBm25FixtureTol = 1e-9;
constexpr int kEsPairs = 1000;
constexpr double kMetricTol = 1e-12;
constexpr int kPromptTrialsPerK = 200;
constexpr std::size_t kCopyFiles = 500;
constexpr std::size_t kCopyInstances = 500;
constexpr double kSigmas = 3.0;
constexpr int kPackCorpora = 100;
constexpr double kRuntimeLimitS = 120.0;

/// Thrown by expect() with a message naming the violated condition.
struct Violation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Violation(what);
}

std::string fmt(double x, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

struct Outcome {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

Outcome run(const std::string& name, const std::function<std::string()>& body, double limit_s = 0.0) {
    Outcome o{name, false, {}, 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        o.detail = body();
        o.passed = true;
    } catch (const std::exception& e) {
        o.detail = e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.passed && limit_s > 0.0 && o.seconds > limit_s) {
        o.passed = false;
        o.detail += "; took " + fmt(o.seconds, 1) + " s, limit " + fmt(limit_s, 0) + " s";
    }
    std::cout << (o.passed ? "PASS " : "FAIL ") << o.name << ": " << o.detail << " [" << fmt(o.seconds, 1) << " s]"
              << std::endl;
    return o;
}

RetrievalUnit text_unit(UnitId id, std::string content, std::string path = {}) {
    RetrievalUnit u;
    u.id = id;
    u.source_path = path.empty() ? "u/" + std::to_string(id) + ".c" : std::move(path);
    u.start_line = u.end_line = 1;
    u.content = std::move(content);
    u.token_count = count_tokens(u.content);
    return u;
}

// ---- 1. retrieval oracle equivalence ----

std::string retrieval_oracle() {
    std::mt19937_64 rng(20240601);
    std::size_t lexical_checked = 0, vector_checked = 0;
    for (int trial = 0; trial < kRetrievalTrials; ++trial) {
        const std::size_t n = 1 + rng() % kMaxUnits;
        const std::size_t vocab = 5 + rng() % 200;

        std::vector<RetrievalUnit> units;
        std::vector<std::pair<std::uint64_t, std::vector<std::string>>> docs;
        for (std::size_t i = 0; i < n; ++i) {
            std::string s;
            const std::size_t len = 1 + rng() % 40;
            for (std::size_t j = 0; j < len; ++j) {
                // skewed draw so some terms are common and some rare
                const std::size_t w = static_cast<std::size_t>(std::pow(static_cast<double>(rng() % 1000) / 1000.0, 3) *
                                                               static_cast<double>(vocab));
                s += (j ? (rng() % 3 ? " " : "_") : "") + std::string("Tok") + std::to_string(w);
            }
            const UnitId id = i * 7 + rng() % 7;
            units.push_back(text_unit(id, s));
            docs.emplace_back(id, oracle::index_terms(s));
        }
        const auto lexical = LexicalIndex::build(units);
        for (int qi = 0; qi < 3; ++qi) {
            std::string q;
            const std::size_t qlen = rng() % 8;
            for (std::size_t j = 0; j < qlen; ++j) q += "tok" + std::to_string(rng() % (vocab + 20)) + " ";
            const std::size_t k = rng() % (n + 5);
            const auto want = oracle::top(oracle::bm25_all(docs, oracle::index_terms(q)), k);
            const auto got = lexical.topk(q, k);
            expect(got.results.size() == want.size(), "lexical result size differs in trial " + std::to_string(trial));
            expect(got.clamped == (k > n), "lexical clamp flag wrong in trial " + std::to_string(trial));
            for (std::size_t r = 0; r < want.size(); ++r) {
                expect(got.results[r].unit_id == want[r].id && got.results[r].rank == r + 1,
                       "lexical id/rank mismatch at rank " + std::to_string(r + 1) + " in trial " + std::to_string(trial));
                expect(std::abs(got.results[r].score - want[r].score) <= kLexicalTol,
                       "lexical score off by " + std::to_string(std::abs(got.results[r].score - want[r].score)));
            }
            ++lexical_checked;
        }

        const std::size_t dims = 8 + rng() % 120;
        std::normal_distribution<double> g;
        VectorIndex vectors(dims);
        std::vector<std::pair<UnitId, std::vector<double>>> raw;
        for (const auto& u : units) {
            std::vector<double> v(dims);
            for (auto& x : v) x = g(rng);
            raw.emplace_back(u.id, v);
            vectors.add(u.id, EmbeddingVector{v});
        }
        for (int qi = 0; qi < 3; ++qi) {
            std::vector<double> q(dims);
            for (auto& x : q) x = g(rng);
            const std::size_t k = rng() % (n + 5);
            std::vector<oracle::Scored> all;
            for (const auto& [id, v] : raw) all.push_back({id, oracle::cosine(v, q)});
            const auto want = oracle::top(all, k);
            const auto got = vectors.topk(EmbeddingVector{q}, k);
            expect(got.results.size() == want.size(), "vector result size differs in trial " + std::to_string(trial));
            for (std::size_t r = 0; r < want.size(); ++r) {
                expect(got.results[r].unit_id == want[r].id && got.results[r].rank == r + 1,
                       "vector id/rank mismatch at rank " + std::to_string(r + 1) + " in trial " + std::to_string(trial));
                expect(std::abs(got.results[r].score - want[r].score) <= kVectorTol, "vector score out of tolerance");
            }
            ++vector_checked;
        }
    }
    return std::to_string(kRetrievalTrials) + " trials, " + std::to_string(lexical_checked) + " lexical and " +
           std::to_string(vector_checked) + " vector queries match the brute-force oracles";
}

// ---- 2. bm25 fixture ----

std::string bm25_fixture() {
    const auto idx = LexicalIndex::build({text_unit(1, "foo bar"), text_unit(2, "foo foo baz"), text_unit(3, "qux")});
    // N = 3, df(foo) = 2, avgdl = 2, k1 = 1.2, b = 0.75
    const double idf = std::log(1.6);
    const double doc1 = idf * (1 * 2.2) / (1 + 1.2 * (0.25 + 0.75 * 2.0 / 2.0)); // = ln 1.6
    const double doc2 = idf * (2 * 2.2) / (2 + 1.2 * (0.25 + 0.75 * 3.0 / 2.0)); // = ln 1.6 * 4.4 / 3.65
    const auto top = idx.topk("foo", 3);
    expect(top.results.size() == 3, "expected three results");
    expect(top.results[0].unit_id == 2 && top.results[1].unit_id == 1 && top.results[2].unit_id == 3,
           "order is not doc2 > doc1 > doc3");
    expect(std::abs(top.results[0].score - doc2) <= kBm25FixtureTol, "doc2 score " + fmt(top.results[0].score, 12));
    expect(std::abs(top.results[1].score - doc1) <= kBm25FixtureTol, "doc1 score " + fmt(top.results[1].score, 12));
    expect(top.results[2].score == 0.0, "doc3 score is not 0");
    return "doc2=" + fmt(top.results[0].score, 9) + " doc1=" + fmt(top.results[1].score, 9) + " doc3=0";
}

// ---- 3. metric oracles ----

std::vector<std::pair<std::string, std::string>> bleu_fixtures() {
    std::vector<std::pair<std::string, std::string>> pairs = {
        {"return 0;", "return 0;"},
        {"a b c d", "a b c e"},
        {"foo bar", "baz qux"},
        {"int x = 1;", "int x = 2;"},
        {"x", "x"},
        {"if (a == b) return;", "if (a != b) return;"},
        {"for (int i = 0; i < n; ++i) {", "for (int i = 0; i < n; i++) {"},
        {"", ""},
        {"", "x = 1;"},
        {"x = 1;", ""},
        {"std::vector<int> v;", "std::vector<long> v;"},
        {"a a a a", "a a b b"},
        {"printf(\"%d\\n\", x);", "printf(\"%d\\n\", y);"},
        {"return a + b;", "return a + b + c;"},
        {"return a + b + c;", "return a + b;"},
        {"obj->run();", "obj.run();"},
    };
    std::mt19937 rng(77);
    const std::vector<std::string> vocab = {"x", "y", "i", "(", ")", "=", "+", ";", "return", "if", "foo", "[", "]", "0"};
    while (pairs.size() < 50) {
        std::string a, b;
        const unsigned la = 1 + rng() % 12, lb = 1 + rng() % 12;
        for (unsigned i = 0; i < la; ++i) a += vocab[rng() % vocab.size()] + " ";
        for (unsigned i = 0; i < lb; ++i) b += vocab[rng() % vocab.size()] + " ";
        if (rng() % 4 == 0) b = a;
        pairs.emplace_back(a, b);
    }
    return pairs;
}

std::string metric_oracles() {
    std::mt19937 rng(4242);
    const std::vector<std::string> alphabet = {"a", "b", "c", "d", " ", "_", ";", "\xc3\xa9", "\xe4\xb8\xad", "\xf0\x9f\x98\x80"};
    double worst = 0.0;
    for (int i = 0; i < kEsPairs; ++i) {
        std::string a, b;
        const unsigned la = rng() % 30, lb = rng() % 30;
        for (unsigned j = 0; j < la; ++j) a += alphabet[rng() % alphabet.size()];
        for (unsigned j = 0; j < lb; ++j) b += alphabet[rng() % alphabet.size()];
        if (i % 10 == 0) b = a;
        const double d = std::abs(edit_similarity(a, b) - oracle::edit_similarity(a, b));
        worst = std::max(worst, d);
        expect(d <= kMetricTol, "edit similarity differs from the DP oracle on pair " + std::to_string(i));
    }
    std::size_t em_pairs = 0;
    for (const auto& [pred, target] : bleu_fixtures()) {
        auto toks = [](const std::string& s) {
            const std::string line = normalize_line(s);
            auto v = default_tokenizer().tokens(line);
            return std::vector<std::string>(v.begin(), v.end());
        };
        const auto r = score_prediction(0, pred, target);
        const double want = oracle::bleu(toks(pred), toks(target));
        expect(std::abs(r.bleu - want) <= kMetricTol, "bleu differs from the n-gram oracle for '" + pred + "'");
        expect(std::abs(r.es - oracle::edit_similarity(normalize_line(pred), normalize_line(target))) <= kMetricTol,
               "edit similarity differs for '" + pred + "'");
        if (r.em == 1) {
            ++em_pairs;
            expect(r.es == 1.0, "em=1 but es<1 for '" + pred + "'");
            expect(std::abs(r.bleu - 1.0) <= kMetricTol, "em=1 but bleu<1 for '" + pred + "'");
        }
        expect(r.es >= 0.0 && r.es <= 1.0 && r.bleu >= 0.0 && r.bleu <= 1.0 + kMetricTol, "score out of bounds");
    }
    expect(em_pairs >= 5, "too few exact-match fixtures to exercise the implication");
    return std::to_string(kEsPairs) + " ES pairs (max diff " + fmt(worst, 3) + "), " +
           std::to_string(bleu_fixtures().size()) + " BLEU pairs, " + std::to_string(em_pairs) +
           " em=1 pairs all with es=1 and bleu=1";
}

// ---- 4. prompt order ----

std::string prompt_order() {
    std::mt19937_64 rng(99);
    std::vector<RetrievalUnit> units;
    for (UnitId id = 0; id < 30; ++id) {
        std::string s = "int unit_" + std::to_string(id) + "() {\n";
        for (unsigned l = 0; l < 1 + rng() % 6; ++l) s += "  step(" + std::to_string(rng() % 100) + ");\n";
        s += "}";
        units.push_back(text_unit(id, s));
    }
    const UnitCatalog catalog(units);
    PromptConfig cfg;
    std::size_t checked = 0;
    for (std::size_t k = 0; k <= 5; ++k) {
        for (int t = 0; t < kPromptTrialsPerK; ++t) {
            const std::string query = "query_" + std::to_string(t) + "(x);\n";
            std::vector<std::size_t> picked = sample_without_replacement(units.size(), k, rng());
            std::vector<double> scores;
            for (std::size_t i = 0; i < k; ++i) scores.push_back(static_cast<double>(rng() % 1000) / 10.0 + 1e-3 * static_cast<double>(i));
            std::sort(scores.rbegin(), scores.rend());
            std::vector<RetrievalResult> results;
            for (std::size_t i = 0; i < k; ++i) results.push_back({units[picked[i]].id, scores[i], i + 1});

            const auto sim = assemble_similarity_prompt(results, catalog, query, cfg);
            std::string expected;
            for (std::size_t i = k; i-- > 0;) expected += units[picked[i]].content + cfg.separator;
            expected += query;
            expect(sim.prompt_text == expected, "similarity prompt layout wrong at K=" + std::to_string(k));
            expect(sim.included_unit_ids.size() == k, "similarity prompt dropped units");
            for (std::size_t i = 1; i < k; ++i) {
                const auto prev = std::find_if(results.begin(), results.end(), [&](auto& r) { return r.unit_id == sim.included_unit_ids[i - 1]; });
                const auto cur = std::find_if(results.begin(), results.end(), [&](auto& r) { return r.unit_id == sim.included_unit_ids[i]; });
                expect(prev->score < cur->score, "similarity is not ascending toward the query at K=" + std::to_string(k));
            }
            if (k > 0) {
                expect(sim.included_unit_ids.back() == results.front().unit_id,
                       "most similar unit is not adjacent to the query at K=" + std::to_string(k));
                const std::string tail = units[picked[0]].content + cfg.separator + query;
                expect(sim.prompt_text.size() >= tail.size() &&
                           sim.prompt_text.compare(sim.prompt_text.size() - tail.size(), tail.size(), tail) == 0,
                       "most similar unit does not immediately precede the query");
            }

            const auto dep = assemble_dependency_prompt(results, catalog, query, cfg);
            expect(dep.prompt_text == expected, "dependency prompt layout wrong at K=" + std::to_string(k));
            if (k > 0) expect(dep.included_unit_ids.back() == results.front().unit_id, "first-called definition is not adjacent to the query");
            for (std::size_t i = 0; i < k; ++i) {
                expect(dep.included_unit_ids[i] == results[k - 1 - i].unit_id, "call index is not descending toward the query");
            }
            expect(sim.prompt_token_count == count_tokens(sim.prompt_text), "token count mismatch");
            ++checked;
        }
    }
    return std::to_string(checked) + " similarity and dependency prompts for K in 0..5 have the expected order";
}

// ---- 5. prompt growth and throughput ----

std::string growth_shape() {
    // A 246-token query growing to about 2,500 tokens at K=5.
    constexpr std::size_t kQueryTokens = 246, kUnitTokens = 449, kInstances = 8;
    std::vector<RetrievalUnit> units;
    for (UnitId id = 0; id < 12; ++id) {
        std::string s;
        for (std::size_t t = 0; t < kUnitTokens; ++t) s += (t ? " " : "") + ("u" + std::to_string(id) + "w" + std::to_string(t % 50));
        units.push_back(text_unit(id, s));
        expect(units.back().token_count == kUnitTokens, "unit fixture has the wrong size");
    }
    std::vector<CompletionInstance> bench;
    for (InstanceId i = 0; i < kInstances; ++i) {
        CompletionInstance inst;
        inst.id = i;
        inst.source_path = "q.c";
        for (std::size_t t = 0; t + 1 < kQueryTokens; ++t) {
            inst.context += (t ? " " : "") + ("u" + std::to_string((i + t) % 12) + "w" + std::to_string(t % 50));
        }
        inst.context += "\n";
        inst.target = "x;";
        inst.context_token_count = count_tokens(inst.context);
        expect(inst.context_token_count == kQueryTokens, "query fixture has " + std::to_string(inst.context_token_count) + " tokens");
        bench.push_back(inst);
    }
    const std::size_t sep = count_tokens("\n\n");

    // Quadratic cost model giving roughly a 4.5x throughput drop from K=0 to
    // K=5; only the shape is asserted.
    LatencyModel model{1.68, 0.0, 2.261e-5, 0.0};
    LatencyModelCompletionProvider completer(std::make_shared<ConstantCompletionProvider>("x;"), model);
    auto ctx = RetrievalContext::build(units, Backends{true, false, false});
    ExperimentConfig cfg;
    cfg.retrieval.strategy = Strategy::sim_bm25;
    auto runs = sweep_topk(cfg, {0, 1, 2, 3, 4, 5}, bench, ctx, completer);

    std::ostringstream detail;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const std::size_t want = kQueryTokens + k * (kUnitTokens + sep);
        for (const auto& o : runs[k].outcomes) {
            expect(o.prompt_tokens == want, "K=" + std::to_string(k) + ": prompt has " + std::to_string(o.prompt_tokens) +
                                                " tokens, expected " + std::to_string(want));
        }
        if (k > 0) {
            expect(runs[k].throughput.tokens_per_second < runs[k - 1].throughput.tokens_per_second,
                   "throughput did not decrease from K=" + std::to_string(k - 1) + " to K=" + std::to_string(k));
        }
        detail << (k ? ", " : "") << "K" << k << ": " << fmt(runs[k].prompt_tokens_mean, 0) << " tok @ "
               << fmt(runs[k].throughput.tokens_per_second, 0) << " tok/s";
    }
    return "tokens = " + std::to_string(kQueryTokens) + " + K*" + std::to_string(kUnitTokens + sep) +
           " exactly; throughput strictly decreasing, K0/K5 ratio " +
           fmt(runs.front().throughput.tokens_per_second / runs.back().throughput.tokens_per_second) + " (" + detail.str() + ")";
}

// ---- shared copy-oracle fixture ----

struct CopySetup {
    fixture::CopyOracleCorpus corpus;
    std::vector<RetrievalUnit> units;
    std::vector<RetrievalUnit> distractors;
    std::vector<CompletionInstance> bench;
};

const CopySetup& copy_setup() {
    static const CopySetup setup = [] {
        CopySetup s;
        s.corpus = fixture::copy_oracle_corpus(kCopyFiles, 2024);
        s.units = segment_corpus(s.corpus.retrieval);
        s.distractors = segment_corpus(s.corpus.distractors);
        BenchmarkOptions opt;
        opt.sample = SampleSpec{kCopyInstances, 17};
        s.bench = make_benchmark(s.corpus.benchmark, opt);
        return s;
    }();
    return setup;
}

// ---- 6. copy oracle end to end ----

std::string copy_oracle_end_to_end() {
    const auto& s = copy_setup();
    expect(s.units.size() == kCopyFiles, "expected one unit per retrieval file");
    expect(s.bench.size() == kCopyInstances, "expected " + std::to_string(kCopyInstances) + " instances");
    CopyOracleCompletionProvider oracle;

    ExperimentConfig bm25;
    bm25.retrieval = {Strategy::sim_bm25, 1, 0};
    const auto hit = run_eval(bm25, s.bench, RetrievalContext::build(s.units, Backends{true, false, false}), oracle);
    expect(hit.report.em_pct == 100.0, "bm25 K=1 EM is " + fmt(hit.report.em_pct));
    expect(hit.report.es_pct == 100.0, "bm25 K=1 ES is " + fmt(hit.report.es_pct));
    expect(std::abs(hit.report.bleu_pct / 100.0 - 1.0) <= kMetricTol, "bm25 K=1 BLEU is " + fmt(hit.report.bleu_pct / 100.0, 6));

    ExperimentConfig random;
    random.retrieval = {Strategy::random, 5, 3};
    const auto miss = run_eval(random, s.bench, RetrievalContext::build(s.distractors, Backends{}), oracle);
    expect(miss.report.em_pct == 0.0, "random over distractors EM is " + fmt(miss.report.em_pct));
    return std::to_string(kCopyFiles) + " files, " + std::to_string(s.bench.size()) +
           " instances: bm25 K=1 EM=" + fmt(hit.report.em_pct) + " ES=" + fmt(hit.report.es_pct) +
           " BLEU=" + fmt(hit.report.bleu_pct / 100.0, 4) + "; random over distractors EM=" + fmt(miss.report.em_pct);
}

// ---- 7. corpus-scale sweep ----

std::string scale_sweep() {
    const auto& s = copy_setup();
    CopyOracleCompletionProvider oracle;
    ExperimentConfig cfg;
    cfg.retrieval = {Strategy::sim_bm25, 1, 0};
    const std::vector<double> fractions = {0.1, 0.25, 0.5, 0.75, 1.0};
    const auto runs = sweep_scale(cfg, fractions, s.units, s.bench, oracle, nullptr, 31);
    const auto full = run_eval(cfg, s.bench, RetrievalContext::build(s.units, Backends{true, false, false}), oracle);

    expect(runs.back().report == full.report, "fraction 1.0 report differs from the full run");
    for (std::size_t i = 0; i < full.outcomes.size(); ++i) {
        expect(record_to_json(runs.back().outcomes[i], false) == record_to_json(full.outcomes[i], false),
               "fraction 1.0 record differs from the full run at instance " + std::to_string(i));
    }
    const double em_full = full.report.em_pct;
    const double n = static_cast<double>(s.bench.size());
    std::ostringstream detail;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const double f = fractions[i];
        const double em = runs[i].report.em_pct;
        if (i > 0) expect(em >= runs[i - 1].report.em_pct, "EM decreased from fraction " + fmt(fractions[i - 1]) + " to " + fmt(f));
        const double p = f * em_full / 100.0;
        const double sigma = 100.0 * std::sqrt(p * (1.0 - p) / n);
        expect(std::abs(em - 100.0 * p) <= kSigmas * sigma + 1e-9,
               "EM at fraction " + fmt(f) + " is " + fmt(em) + ", expected " + fmt(100 * p) + " +/- " + fmt(kSigmas * sigma));
        detail << (i ? ", " : "") << "f=" << fmt(f) << ": " << fmt(em) << " (expect " << fmt(100 * p) << " +/- "
               << fmt(kSigmas * sigma) << ")";
    }
    return "EM non-decreasing and within 3 sigma; fraction 1.0 identical to the full run (" + detail.str() + ")";
}

// ---- 8. training block packing ----

std::string packing() {
    std::mt19937_64 rng(8080);
    const std::vector<std::string> pieces = {"int", "x", "_y1", "(", ")", "{", "}", ";", "\n", " ", "\t",
                                             "\xc3\xa9", "\xe4\xb8\xad", "42", "->", "::", "\"s\"", "  "};
    std::size_t blocks_checked = 0;
    for (int c = 0; c < kPackCorpora; ++c) {
        std::vector<SourceFile> files;
        const std::size_t n_files = rng() % 6;
        for (std::size_t f = 0; f < n_files; ++f) {
            std::string s;
            const std::size_t len = rng() % 4000;
            for (std::size_t i = 0; i < len; ++i) s += pieces[rng() % pieces.size()];
            files.push_back(make_source_file("d" + std::to_string(rng() % 1000) + "/f" + std::to_string(f) + ".c", s));
        }
        auto ordered = files;
        std::sort(ordered.begin(), ordered.end(), [](auto& a, auto& b) { return a.path < b.path; });
        std::vector<std::string> stream;
        for (const auto& f : ordered) {
            auto t = oracle::code_tokens(f.content);
            stream.insert(stream.end(), t.begin(), t.end());
        }
        for (std::size_t L : {16, 256, 4096}) {
            const auto packed = pack_training_blocks(files, L);
            expect(packed.total_tokens == stream.size(), "token count differs from the oracle stream");
            expect(packed.blocks.size() == stream.size() / L,
                   "corpus " + std::to_string(c) + ", L=" + std::to_string(L) + ": " + std::to_string(packed.blocks.size()) +
                       " blocks for " + std::to_string(stream.size()) + " tokens");
            std::size_t pos = 0;
            for (const auto& b : packed.blocks) {
                expect(b.tokens.size() == L, "block of the wrong length");
                for (auto id : b.tokens) {
                    expect(packed.vocabulary.tokens().at(id) == stream[pos], "block content differs from the stream at token " + std::to_string(pos));
                    ++pos;
                }
            }
            blocks_checked += packed.blocks.size();
        }
    }
    return std::to_string(kPackCorpora) + " corpora x L in {16, 256, 4096}: " + std::to_string(blocks_checked) +
           " blocks, counts floor(n/L), decoded blocks equal the stream prefix";
}

// ---- 9. pipeline determinism ----

std::vector<std::filesystem::path> pipeline(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    const auto corpus = fixture::copy_oracle_corpus(60, 5);
    for (const auto& f : corpus.retrieval) fixture::write_file(root / "src" / f.path, f.content);
    for (const auto& f : corpus.benchmark) fixture::write_file(root / "src" / (f.path + "x"), f.content); // ".cppx" is ignored
    for (const auto& f : corpus.distractors) fixture::write_file(root / "src" / f.path, f.content);
    fixture::write_file(root / "src/dup/copy.cpp", corpus.retrieval[3].content);

    const fs::path store = root / "store";
    const auto ingested = ingest(root / "src", FilterConfig{});
    write_file_store(store / "files.jsonl", ingested.files, default_tokenizer().id());
    const auto units = segment_corpus(ingested.files);
    write_unit_store(store / "units.jsonl", units, default_tokenizer().id());

    MockEmbeddingProvider embedder(128, 1);
    const auto ctx = RetrievalContext::build(read_unit_store(store / "units.jsonl"), Backends{true, true, true}, &embedder);
    ctx.lexical()->save(store / "bm25.index.jsonl");
    ctx.vectors()->save(store / "vector.index.jsonl");
    ctx.symbols()->save(store / "symbol.index.jsonl");

    std::vector<SourceFile> bench_files;
    for (const auto& f : corpus.benchmark) bench_files.push_back(f);
    BenchmarkOptions opt;
    opt.sample = SampleSpec{80, 6};
    write_benchmark_store(store / "bench.jsonl", make_benchmark(bench_files, opt), default_tokenizer().id(), 20, 1);
    const auto bench = read_benchmark_store(store / "bench.jsonl").instances;

    const RetrievalContext loaded(units, LexicalIndex::load(store / "bm25.index.jsonl"),
                                  VectorIndex::load(store / "vector.index.jsonl"),
                                  SymbolIndex::load(store / "symbol.index.jsonl"));
    CopyOracleCompletionProvider oracle;
    std::vector<RunResult> topk, scale;
    for (auto strategy : {Strategy::sim_bm25, Strategy::sim_vector, Strategy::dependency, Strategy::random}) {
        ExperimentConfig cfg;
        cfg.retrieval = {strategy, 0, 13};
        cfg.concurrency = 4;
        for (auto& r : sweep_topk(cfg, {0, 1, 2, 3}, bench, loaded, oracle, &embedder)) topk.push_back(std::move(r));
    }
    ExperimentConfig scfg;
    scfg.retrieval = {Strategy::sim_bm25, 1, 0};
    scale = sweep_scale(scfg, {0.25, 0.5, 1.0}, units, bench, oracle, nullptr, 9);

    std::vector<const RunResult*> all, tp, sp;
    std::vector<EvalReport> reports;
    for (const auto& r : topk) {
        all.push_back(&r);
        tp.push_back(&r);
        reports.push_back(r.report);
    }
    for (const auto& r : scale) {
        all.push_back(&r);
        sp.push_back(&r);
        reports.push_back(r.report);
    }
    const fs::path out = root / "run";
    write_records(out / "records.jsonl", all, TimingLog::separate, out / "timings.jsonl");
    emit_report(reports, out / "report.csv", ReportFormat::csv);
    emit_report(reports, out / "report.json", ReportFormat::json);
    emit_charts(out / "charts", tp, sp);

    return {"store/files.jsonl",        "store/units.jsonl",         "store/bm25.index.jsonl",
            "store/vector.index.jsonl", "store/symbol.index.jsonl",  "store/bench.jsonl",
            "run/records.jsonl",        "run/report.csv",            "run/report.json",
            "run/charts/em_vs_k.svg",   "run/charts/prompt_tokens_vs_k.svg", "run/charts/em_vs_fraction.svg"};
}

std::string determinism() {
    fixture::TempDir a("coderag-accept-a"), b("coderag-accept-b");
    const auto files = pipeline(a.path());
    pipeline(b.path());
    std::size_t bytes = 0;
    for (const auto& rel : files) {
        const auto x = fixture::read_file(a / rel.string());
        const auto y = fixture::read_file(b / rel.string());
        expect(!x.empty(), rel.string() + " was not written");
        expect(x == y, rel.string() + " differs between runs");
        bytes += x.size();
    }
    return std::to_string(files.size()) + " artifacts (" + std::to_string(bytes) +
           " bytes: stores, indexes, records, reports, charts) byte-identical across two runs";
}

} // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    std::vector<Outcome> results;
    results.push_back(run("retrieval-oracle-equivalence", retrieval_oracle, 60.0));
    results.push_back(run("bm25-fixture", bm25_fixture));
    results.push_back(run("metric-oracles", metric_oracles));
    results.push_back(run("prompt-order", prompt_order));
    results.push_back(run("prompt-growth-and-throughput", growth_shape, kRuntimeLimitS));
    results.push_back(run("copy-oracle-end-to-end", copy_oracle_end_to_end, kRuntimeLimitS));
    results.push_back(run("corpus-scale-sweep", scale_sweep));
    results.push_back(run("training-block-packing", packing));
    results.push_back(run("pipeline-determinism", determinism));
    const auto failed = std::count_if(results.begin(), results.end(), [](const Outcome& o) { return !o.passed; });
    std::cout << (results.size() - static_cast<std::size_t>(failed)) << "/" << results.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
