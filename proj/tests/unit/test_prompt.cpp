#include "coderag/error.hpp"
#include "coderag/prompt.hpp"

#include <doctest.h>

using namespace coderag;

namespace {

std::vector<RetrievalUnit> units() {
    std::vector<RetrievalUnit> u(3);
    u[0].id = 1;
    u[0].content = "int A;";
    u[0].source_path = "a.c";
    u[1].id = 2;
    u[1].content = "int B;";
    u[1].source_path = "b.c";
    u[2].id = 3;
    u[2].content = "int C;";
    u[2].source_path = "c.c";
    return u;
}

} // namespace

TEST_CASE("token counting") {
    CHECK(count_tokens("") == 0);
    CHECK(count_tokens("return a[i] + 1;") == 8);
    const std::string a = "int x;", b = "y = x;", sep = "\n\n";
    CHECK(count_tokens(a + sep + b) - count_tokens(a) - count_tokens(b) == count_tokens(sep));
}

TEST_CASE("similarity prompt order") {
    auto us = units();
    UnitCatalog cat(us);
    PromptConfig cfg;
    const std::string q = "q();\n";
    auto p = assemble_similarity_prompt({{1, 0.9, 1}, {2, 0.5, 2}}, cat, q, cfg);
    CHECK(p.prompt_text == "int B;\n\nint A;\n\nq();\n");
    CHECK(p.included_unit_ids == std::vector<UnitId>{2, 1});
    CHECK(p.prompt_token_count == count_tokens(p.prompt_text));
    CHECK(p.query_text == q);
    CHECK_FALSE(p.truncated);

    auto base = assemble_similarity_prompt({}, cat, q, cfg);
    CHECK(base.prompt_text == q);
    CHECK(base.prompt_token_count == count_tokens(q));

    CHECK_THROWS_AS(assemble_similarity_prompt({{1, 0.1, 1}, {2, 0.5, 2}}, cat, q, cfg), DataError);
    CHECK_THROWS_AS(assemble_similarity_prompt({{42, 0.5, 1}}, cat, q, cfg), DataError);
}

TEST_CASE("budget drops the least similar units first") {
    auto us = units();
    UnitCatalog cat(us);
    PromptConfig cfg;
    const std::string q = "q();\n";
    // A alone: 3 + 2 + 5 = 10 tokens; with B: 15.
    cfg.max_prompt_tokens = 12;
    auto p = assemble_similarity_prompt({{1, 0.9, 1}, {2, 0.5, 2}}, cat, q, cfg);
    CHECK(p.prompt_text == "int A;\n\nq();\n");
    CHECK(p.truncated);
    CHECK(p.prompt_token_count <= cfg.max_prompt_tokens);

    cfg.max_prompt_tokens = 4;
    CHECK_THROWS_AS(assemble_similarity_prompt({{1, 0.9, 1}}, cat, q, cfg), DataError);
    cfg.max_prompt_tokens = 0;
    CHECK_THROWS_AS(cfg.validate(), DataError);
}

TEST_CASE("dependency prompt order") {
    auto us = units();
    UnitCatalog cat(us);
    PromptConfig cfg;
    const std::string q = "q();\n";
    auto p = assemble_dependency_prompt({{1, 1.0, 1}, {2, 1.0, 2}}, cat, q, cfg);
    CHECK(p.prompt_text == "int B;\n\nint A;\n\nq();\n");
    CHECK(assemble_dependency_prompt({}, cat, q, cfg).prompt_text == q);

    cfg.max_prompt_tokens = 15;
    auto t = assemble_dependency_prompt({{1, 1.0, 1}, {2, 1.0, 2}, {3, 1.0, 3}}, cat, q, cfg);
    CHECK(t.prompt_text == "int B;\n\nint A;\n\nq();\n");
    CHECK(t.truncated);
}

TEST_CASE("source headers and custom separators") {
    auto us = units();
    UnitCatalog cat(us);
    PromptConfig cfg;
    cfg.include_source_header = true;
    cfg.separator = "\n";
    CHECK(unit_snippet(us[0], cfg) == "// a.c\nint A;");
    auto p = assemble_similarity_prompt({{1, 0.9, 1}}, cat, "q", cfg);
    CHECK(p.prompt_text == "// a.c\nint A;\nq");
}

TEST_CASE("catalog lookup") {
    auto us = units();
    UnitCatalog cat(us);
    CHECK(cat.size() == 3);
    CHECK(cat.contains(2));
    CHECK_FALSE(cat.contains(9));
    CHECK(cat.at(3).content == "int C;");
    CHECK_THROWS_AS(cat.at(9), DataError);
    CHECK(cat.ids() == std::vector<UnitId>{1, 2, 3});
}
