#pragma once

#include "coderag/bench.hpp"
#include "coderag/corpus.hpp"
#include "coderag/providers.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace coderag {

struct CorpusSettings {
    std::string root;
    std::size_t window = 20;
    std::size_t stride = 1;
    std::size_t sample = 0; // 0 = keep every filtered instance
    std::uint64_t seed = 0;
    double test_fraction = 0.0; // 0 = no holdout split at ingest
    std::size_t block_length = 4096;
    FilterConfig filter;
};

struct RetrievalSettings {
    Strategy strategy = Strategy::sim_bm25;
    std::size_t k = 5;
    std::uint64_t seed = 0;
    Bm25Params bm25;
};

struct ProviderSettings {
    bool mock = false;
    EmbeddingProviderConfig embed;
    CompletionProviderConfig complete;
    std::string mock_completion = "copy_oracle"; // copy_oracle | constant
    std::string mock_constant_text;
    std::size_t mock_match_lines = 3;
    LatencyModel mock_latency;
};

struct BenchSettings {
    std::size_t concurrency = 1;
    int max_tokens = 512;
    double max_failure_rate = 0.05;
    std::vector<std::size_t> ks = {0, 1, 2, 3, 4, 5};
    std::vector<double> fractions = {0.25, 0.5, 0.75, 1.0};
    TimingLog timing_log = TimingLog::separate;
    std::uint64_t scale_seed = 0;
};

/// Every setting the command-line tool understands, grouped by INI section.
struct AppConfig {
    CorpusSettings corpus;
    RetrievalSettings retrieval;
    PromptConfig prompt;
    ProviderSettings providers;
    BenchSettings bench;

    /// Sets "section.key" from its text form. Throws DataError for an
    /// unknown key or a value that does not parse.
    void set(const std::string& dotted_key, const std::string& value);
    /// Applies "section.key=value".
    void apply_override(const std::string& assignment);

    /// INI text with every key, loadable by load_config.
    std::string render() const;
    void validate() const;
};

/// Reads an INI file ([section] / key = value). Unknown keys are errors.
AppConfig load_config(const std::filesystem::path& path);

/// Parses "0..5" or "0,1,3" into a list of non-negative integers.
std::vector<std::size_t> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

/// Escapes used for string values: "\n" and "\t" sequences and backslash.
std::string unescape(const std::string& s);
std::string escape(const std::string& s);

} // namespace coderag
