#include "coderag/error.hpp"
#include "coderag/metrics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace coderag;

namespace {

std::vector<std::string> toks(const std::string& s) {
    auto v = default_tokenizer().tokens(s);
    return {v.begin(), v.end()};
}

EvalRecord rec(InstanceId id, int em, double es, double bleu, bool failed = false) {
    EvalRecord r;
    r.instance_id = id;
    r.em = em;
    r.es = es;
    r.bleu = bleu;
    r.failed = failed;
    return r;
}

} // namespace

TEST_CASE("line normalization and exact match") {
    CHECK(normalize_line("  return 0;  ") == "return 0;");
    CHECK(normalize_line("") == "");
    CHECK(normalize_line("a  +  b") == "a  +  b");
    CHECK(exact_match("return 0;", "return 0;") == 1);
    CHECK(exact_match("return 0;", "return 1;") == 0);
    CHECK(exact_match("  x++;", "x++;") == 1);
}

TEST_CASE("edit similarity") {
    CHECK(edit_similarity("abc", "abc") == 1.0);
    CHECK(edit_similarity("", "abc") == 0.0);
    CHECK(edit_similarity("", "") == 1.0);
    CHECK(edit_similarity("kitten", "sitting") == doctest::Approx(1.0 - 3.0 / 7.0).epsilon(1e-12));
    CHECK(edit_similarity("caf\xc3\xa9", "cafe") == doctest::Approx(0.75));

    std::mt19937 rng(1);
    const std::vector<std::string> alphabet = {"a", "b", "c", " ", "\xc3\xa9", "\xe2\x82\xac"};
    for (int i = 0; i < 300; ++i) {
        std::string a, b;
        for (unsigned j = 0; j < rng() % 15; ++j) a += alphabet[rng() % alphabet.size()];
        for (unsigned j = 0; j < rng() % 15; ++j) b += alphabet[rng() % alphabet.size()];
        CHECK(edit_similarity(a, b) == doctest::Approx(oracle::edit_similarity(a, b)).epsilon(1e-12));
        CHECK(levenshtein(oracle::code_points(a), oracle::code_points(b)) ==
              oracle::levenshtein(oracle::code_points(a), oracle::code_points(b)));
    }
}

TEST_CASE("bleu") {
    CHECK(bleu("int x = a + b ;", "int x = a + b ;") == doctest::Approx(1.0));
    CHECK(bleu("foo bar", "baz qux") == 0.0);
    CHECK(bleu("", "x") == 0.0);
    CHECK(bleu("", "") == 1.0);
    // "a b c d" vs "a b c e": p1 = 3/4, p2 = 2/3, p3 = 1/2, p4 = 0 -> 1/(1+1); bp = 1
    const double want = std::exp((std::log(0.75) + std::log(2.0 / 3) + std::log(0.5) + std::log(0.5)) / 4);
    CHECK(bleu("a b c d", "a b c e") == doctest::Approx(want).epsilon(1e-12));
    CHECK(bleu("a b c d", "a b c e") == doctest::Approx(oracle::bleu(toks("a b c d"), toks("a b c e"))).epsilon(1e-12));
    // brevity penalty
    CHECK(bleu("a b", "a b c d") < bleu("a b c d", "a b c d"));
}

TEST_CASE("bleu is invariant under consistent renaming") {
    const std::string a = "int count = total + count ;", b = "int count = total * 2 ;";
    const std::string ra = "int n = sum + n ;", rb = "int n = sum * 2 ;";
    CHECK(bleu(a, b) == doctest::Approx(bleu(ra, rb)).epsilon(1e-12));
}

TEST_CASE("first line truncation") {
    CHECK(truncate_to_first_line("x = 1;\ny = 2;") == "x = 1;");
    CHECK(truncate_to_first_line("x = 1;") == "x = 1;");
    CHECK(truncate_to_first_line("\nfoo") == "");
}

TEST_CASE("scoring and aggregation") {
    auto r = score_prediction(3, "  x++; ", "x++;");
    CHECK(r.em == 1);
    CHECK(r.es == 1.0);
    CHECK(r.bleu == doctest::Approx(1.0));

    auto all = aggregate({rec(0, 1, 1, 1), rec(1, 1, 1, 1)});
    CHECK(all.em_pct == 100.0);
    auto half = aggregate({rec(0, 1, 1, 1), rec(1, 0, 0.5, 0.2)}, "sim_bm25", 5);
    CHECK(half.em_pct == 50.0);
    CHECK(half.es_pct == 75.0);
    CHECK(half.bleu_pct == doctest::Approx(60.0));
    CHECK(half.n_instances == 2);
    CHECK(half.strategy == "sim_bm25");

    auto with_failure = aggregate({rec(0, 1, 1, 1), rec(1, 0, 0, 0, true)});
    CHECK(with_failure.em_pct == 100.0);
    CHECK(with_failure.n_failed == 1);
    CHECK(with_failure.n_instances == 1);
    CHECK_THROWS_AS(aggregate({}), DataError);
    CHECK_THROWS_AS(aggregate({rec(0, 0, 0, 0, true)}), DataError);
}

TEST_CASE("aggregation matches re-summation and ignores order") {
    std::mt19937 rng(6);
    std::vector<EvalRecord> records;
    double em = 0, es = 0, bl = 0;
    for (int i = 0; i < 50; ++i) {
        const int e = static_cast<int>(rng() % 2);
        const double s = e ? 1.0 : (rng() % 100) / 100.0;
        const double b = e ? 1.0 : (rng() % 100) / 200.0;
        records.push_back(rec(static_cast<InstanceId>(i), e, s, b));
        em += e;
        es += s;
        bl += b;
    }
    auto rep = aggregate(records);
    CHECK(rep.em_pct == doctest::Approx(em / 50 * 100).epsilon(1e-12));
    CHECK(rep.es_pct == doctest::Approx(es / 50 * 100).epsilon(1e-12));
    CHECK(rep.bleu_pct == doctest::Approx(bl / 50 * 100).epsilon(1e-12));
    for (double v : {rep.em_pct, rep.es_pct, rep.bleu_pct}) {
        CHECK(v >= 0.0);
        CHECK(v <= 100.0);
    }
    std::shuffle(records.begin(), records.end(), rng);
    CHECK(aggregate(records) == rep);
}

TEST_CASE("report json round trip") {
    EvalReport r{"random", 3, 0.5, 10, 1, 12.345, 50.0, 33.333};
    auto back = report_from_json(to_json(r));
    CHECK(back.strategy == "random");
    CHECK(back.k == 3);
    CHECK(back.em_pct == round2(12.345));
    CHECK(round2(1.005) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(round2(2.499999) == 2.5);
}
