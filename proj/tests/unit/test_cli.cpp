#include "fixtures.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(CODERAG_CLI_PATH) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) r.out += buf.data();
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

/// Small tree: the copy-oracle corpus plus a duplicate file.
void write_tree(const fs::path& root, std::size_t files) {
    auto c = fixture::copy_oracle_corpus(files);
    for (const auto& f : c.retrieval) fixture::write_file(root / f.path, f.content);
    fixture::write_file(root / "zz_copy.cpp", c.retrieval[0].content);
}

} // namespace

TEST_CASE("usage errors exit 64") {
    CHECK(cli("--no-such-flag").code == 64);
    CHECK(cli("").code == 64);
    CHECK(cli("eval").code == 64);
    CHECK(cli("--help").code == 0);
}

TEST_CASE("ingest") {
    fixture::TempDir dir;
    write_tree(dir / "src", 10);
    auto r = cli("ingest " + q(dir / "src") + " -o " + q(dir / "store"));
    REQUIRE(r.code == 0);
    auto report = nlohmann::json::parse(fixture::read_file(dir / "store/filter_report.json"));
    CHECK(report["removed_duplicate"] == 1);
    CHECK(report["kept"] == 10);

    REQUIRE(cli("ingest " + q(dir / "src") + " -o " + q(dir / "again")).code == 0);
    for (const char* f : {"files.jsonl", "units.jsonl", "filter_report.json"}) {
        CHECK(fixture::read_file(dir / "store" / f) == fixture::read_file(dir / "again" / f));
    }

    fs::create_directories(dir / "empty");
    auto empty = cli("ingest " + q(dir / "empty") + " -o " + q(dir / "e"));
    CHECK(empty.code == 1);
    CHECK(empty.out.find("no files") != std::string::npos);
    CHECK(cli("ingest " + q(dir / "missing") + " -o " + q(dir / "m")).code == 1);
}

TEST_CASE("index backends") {
    fixture::TempDir dir;
    write_tree(dir / "src", 10);
    REQUIRE(cli("ingest " + q(dir / "src") + " -o " + q(dir / "store")).code == 0);
    auto bm25 = cli("index -s " + q(dir / "store") + " -b bm25");
    REQUIRE(bm25.code == 0);
    CHECK(bm25.out.find("N=10") != std::string::npos);
    CHECK(fs::exists(dir / "store/bm25.index.jsonl"));

    auto vec = cli("--mock-providers index -s " + q(dir / "store") + " -b vector");
    CHECK(vec.code == 0);
    CHECK(vec.out.find("entries=10") != std::string::npos);

    auto sym = cli("index -s " + q(dir / "store") + " -b symbol");
    CHECK(sym.code == 0);
    CHECK(sym.out.find("names=10") != std::string::npos);

    auto down = cli("--set providers.embed_endpoint=http://127.0.0.1:1 --set providers.retries=1 index -s " +
                    q(dir / "store") + " -b vector");
    CHECK(down.code == 2);
    CHECK(cli("index -s " + q(dir / "store") + " -b psychic").code == 64);
}

TEST_CASE("bench-make") {
    fixture::TempDir dir;
    std::string s;
    for (int i = 1; i <= 25; ++i) {
        if (i == 22) s += "}\n";
        else if (i == 24) s += "// trailing note\n";
        else s += "value" + std::to_string(i) + " = " + std::to_string(i) + ";\n";
    }
    fixture::write_file(dir / "src/a.c", s);
    REQUIRE(cli("ingest " + q(dir / "src") + " -o " + q(dir / "store")).code == 0);
    auto r = cli("bench-make -f " + q(dir / "store/files.jsonl") + " -o " + q(dir / "b.jsonl"));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("3 instances") != std::string::npos);
    REQUIRE(cli("bench-make -f " + q(dir / "store/files.jsonl") + " -o " + q(dir / "b2.jsonl")).code == 0);
    CHECK(fixture::read_file(dir / "b.jsonl") == fixture::read_file(dir / "b2.jsonl"));
    CHECK(cli("bench-make -f " + q(dir / "store/files.jsonl") + " -o " + q(dir / "c.jsonl") + " --sample 4").code == 1);
    CHECK(cli("bench-make -f " + q(dir / "store/files.jsonl") + " -o " + q(dir / "d.jsonl") + " --window 30").code == 1);
}

TEST_CASE("eval, sweep and report") {
    fixture::TempDir dir;
    write_tree(dir / "src", 12);
    REQUIRE(cli("ingest " + q(dir / "src") + " -o " + q(dir / "store")).code == 0);
    REQUIRE(cli("bench-make -f " + q(dir / "store/files.jsonl") + " -o " + q(dir / "bench.jsonl") +
                " --sample 30 --seed 1")
                .code == 0);
    const std::string io = " -s " + q(dir / "store") + " -B " + q(dir / "bench.jsonl");

    auto cfg = cli("--print-config");
    CHECK(cfg.code == 0);
    CHECK(cfg.out.find("strategy = sim_bm25") != std::string::npos);
    CHECK(cfg.out.find("k = 5") != std::string::npos);

    auto r1 = cli("--mock-providers eval --strategy random --seed 7" + io + " -o " + q(dir / "r1"));
    auto r2 = cli("--mock-providers eval --strategy random --seed 7" + io + " -o " + q(dir / "r2"));
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);
    for (const char* f : {"report.csv", "report.json", "records.jsonl"}) {
        CHECK(fixture::read_file(dir / "r1" / f) == fixture::read_file(dir / "r2" / f));
    }
    CHECK(fs::exists(dir / "r1/timings.jsonl"));

    auto bm = cli("--mock-providers eval --strategy sim-bm25 --k 1" + io + " -o " + q(dir / "bm"));
    REQUIRE(bm.code == 0);
    auto bm_report = nlohmann::json::parse(fixture::read_file(dir / "bm/report.json"));
    CHECK(bm_report[0]["em_pct"] == 100.0);

    auto sweep = cli("--mock-providers sweep --k 0..5" + io + " -o " + q(dir / "sweep"));
    REQUIRE(sweep.code == 0);
    const auto csv = fixture::read_file(dir / "sweep/report.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(fs::exists(dir / "sweep/charts/em_vs_k.svg"));
    CHECK(fs::exists(dir / "sweep/charts/prompt_tokens_vs_k.svg"));

    const auto before = fixture::read_file(dir / "sweep/report.csv");
    fs::remove(dir / "sweep/report.csv");
    REQUIRE(cli("report -i " + q(dir / "sweep") + " --format csv").code == 0);
    CHECK(fixture::read_file(dir / "sweep/report.csv") == before);
    CHECK(cli("report -i " + q(dir / "nowhere")).code == 1);

    auto scale = cli("--mock-providers sweep --k 1 --scale --fractions 0.5,1.0" + io + " -o " + q(dir / "scale"));
    REQUIRE(scale.code == 0);
    CHECK(fs::exists(dir / "scale/charts/em_vs_fraction.svg"));

    auto gate = cli("--set providers.complete_endpoint=http://127.0.0.1:1 --set providers.retries=1 eval" + io +
                    " -o " + q(dir / "gate"));
    CHECK(gate.code == 3);
}

TEST_CASE("ftprep") {
    fixture::TempDir dir;
    std::string s;
    for (int i = 0; i < 10000; ++i) s += "t" + std::to_string(i % 97) + (i % 20 == 19 ? "\n" : " ");
    s.pop_back();
    s += " end";
    fixture::write_file(dir / "src/big.c", s);
    REQUIRE(cli("ingest " + q(dir / "src") + " -o " + q(dir / "store")).code == 0);
    // 10000 words plus 499 newlines and the final word
    auto r = cli("ftprep -f " + q(dir / "store/files.jsonl") + " -o " + q(dir / "blocks.jsonl") + " -L 4096");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("2 blocks") != std::string::npos);
    REQUIRE(cli("ftprep -f " + q(dir / "store/files.jsonl") + " -o " + q(dir / "again.jsonl") + " -L 4096").code == 0);
    CHECK(fixture::read_file(dir / "blocks.jsonl") == fixture::read_file(dir / "again.jsonl"));
    CHECK(cli("ftprep -f " + q(dir / "store/files.jsonl") + " -o " + q(dir / "zero.jsonl") + " -L 0").code == 64);
}
