#pragma once

#include "coderag/grammar.hpp"
#include "coderag/tokenizer.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coderag {

using UnitId = std::uint64_t;
using InstanceId = std::uint64_t;

struct SourceFile {
    std::string path; // relative, '/'-separated
    std::string content;
    std::size_t line_count = 0;
    std::size_t token_count = 0;
    std::uint64_t content_hash = 0; // of whitespace-normalized content

    friend bool operator==(const SourceFile&, const SourceFile&) = default;
};

SourceFile make_source_file(std::string path, std::string content,
                            const Tokenizer& tokenizer = default_tokenizer());

struct FilterConfig {
    std::size_t max_define_body_chars = 512;
    double max_nonascii_comment_ratio = 0.3;
    // Matched against "/" + relative path, so "/moc_" only hits file or
    // directory names that start with "moc_".
    std::vector<std::string> generated_path_markers = {
        ".pb.h", ".pb.cc", ".pb.cpp", ".grpc.pb.", "/moc_", "/qrc_", "/ui_", "/generated/",
        "_generated.", ".generated."};
    // Matched against the first kGeneratedHeaderBytes bytes of content.
    std::vector<std::string> generated_content_markers = {
        "@generated", "DO NOT EDIT", "Generated by the protocol buffer compiler",
        "automatically generated", "auto-generated", "autogenerated", "Code generated by"};
    std::vector<std::string> extensions = {".c",  ".cc",  ".cpp", ".cxx", ".c++", ".h", ".hh",
                                           ".hpp", ".hxx", ".h++", ".inl", ".ipp", ".tcc"};
    std::size_t threads = 0; // 0 = hardware concurrency

    static constexpr std::size_t kGeneratedHeaderBytes = 4096;

    /// Throws DataError on non-positive thresholds or a ratio outside [0, 1].
    void validate() const;
};

struct FilterReport {
    std::size_t kept = 0;
    std::size_t removed_duplicate = 0;
    std::size_t removed_generated = 0;
    std::size_t removed_comment_heavy = 0;
    std::size_t removed_long_define = 0;
    std::size_t removed_unreadable = 0;

    std::size_t total_scanned() const {
        return kept + removed_duplicate + removed_generated + removed_comment_heavy +
               removed_long_define + removed_unreadable;
    }
    friend bool operator==(const FilterReport&, const FilterReport&) = default;
};

enum class FileVerdict { keep, generated, comment_heavy, long_define, unreadable };

/// Per-file content rules (everything except deduplication).
FileVerdict classify_file(std::string_view path, std::string_view bytes, const FilterConfig& cfg);

/// Fraction of non-ASCII code points among non-whitespace comment characters.
double nonascii_comment_ratio(std::string_view source);

/// Longest #define body in code points; 0 when there are no defines.
std::size_t longest_define_body(std::string_view source);

struct IngestResult {
    std::vector<SourceFile> files; // sorted by path
    FilterReport report;
};

/// Scans root recursively (skipping dot-directories) for files whose
/// extension is listed in cfg, applies the filter rules, and deduplicates by
/// content hash keeping the lexicographically smallest path. Unreadable and
/// non-UTF-8 files are counted, never fatal. Throws DataError when root is
/// missing or not a directory.
IngestResult ingest(const std::filesystem::path& root, const FilterConfig& cfg,
                    const Tokenizer& tokenizer = default_tokenizer());

struct CorpusSplit {
    std::vector<SourceFile> retrieval;
    std::vector<SourceFile> test;
};

/// Seeded file-level holdout: round(test_fraction * n) files go to test.
CorpusSplit split_corpus(const std::vector<SourceFile>& files, double test_fraction,
                         std::uint64_t seed);

struct RetrievalUnit {
    UnitId id = 0;
    std::string source_path;
    UnitKind kind = UnitKind::whole_file;
    std::optional<std::string> name;
    std::size_t start_line = 0;
    std::size_t end_line = 0;
    std::string content;
    std::size_t token_count = 0;

    friend bool operator==(const RetrievalUnit&, const RetrievalUnit&) = default;
};

struct SegmentOutcome {
    std::vector<RetrievalUnit> units;
    bool fell_back = false; // parse failure turned into one whole_file unit
    std::string warning;
};

/// Splits one file into retrieval units with ids first_id, first_id + 1, ...
/// Never drops a file: no function definitions or a parse failure both give
/// a single whole_file unit (the latter with a warning). An empty file gives
/// no units.
SegmentOutcome segment(const SourceFile& file, UnitId first_id = 0,
                       const Tokenizer& tokenizer = default_tokenizer(),
                       const Grammar& grammar = default_grammar());

/// Segments every file (in the given order) with consecutive ids from 0.
/// Parse-failure warnings are logged.
std::vector<RetrievalUnit> segment_corpus(const std::vector<SourceFile>& files,
                                          const Tokenizer& tokenizer = default_tokenizer(),
                                          const Grammar& grammar = default_grammar());

struct CompletionInstance {
    InstanceId id = 0;
    std::string source_path;
    std::size_t target_line = 0; // 1-based line of the target in its file
    std::string context;         // window lines, each terminated by '\n'
    std::string target;
    std::size_t context_token_count = 0;

    friend bool operator==(const CompletionInstance&, const CompletionInstance&) = default;
};

enum class TargetVerdict { keep, blank, single_symbol, comment_only };

/// Classifies a candidate target line. line_flags comes from the lexer
/// (cfamily::LineFlags) and may be empty, in which case comment detection
/// falls back to the line text alone.
TargetVerdict classify_target(std::string_view line, std::uint8_t line_flags, bool have_flags);

/// Trimmed length <= 1, or every character is ASCII punctuation.
bool is_single_symbol(std::string_view line);

struct SampleSpec {
    std::size_t count = 0;
    std::uint64_t seed = 0;
};

struct BenchmarkOptions {
    std::size_t window = 20;
    std::size_t stride = 1;
    std::optional<SampleSpec> sample;
};

struct BenchmarkStats {
    std::size_t candidates = 0;
    std::size_t filtered_blank = 0;
    std::size_t filtered_single_symbol = 0;
    std::size_t filtered_comment = 0;
    std::size_t after_filter = 0;
    std::size_t sampled = 0; // == after_filter when no sampling
};

/// Sliding-window benchmark. Files are visited in path order; instance ids
/// number the post-filter candidates in that order and are kept through
/// sampling, and the result is sorted by id. Throws DataError for window or
/// stride of zero, or a sample larger than the filtered population.
std::vector<CompletionInstance> make_benchmark(const std::vector<SourceFile>& files,
                                               const BenchmarkOptions& options,
                                               const Tokenizer& tokenizer = default_tokenizer(),
                                               BenchmarkStats* stats = nullptr);

struct BlockOrigin {
    std::string first_path;
    std::size_t first_byte = 0; // offset of the first token in first_path
    std::string last_path;
    std::size_t last_byte_end = 0; // end offset of the last token in last_path

    friend bool operator==(const BlockOrigin&, const BlockOrigin&) = default;
};

struct TrainingBlock {
    std::vector<std::uint32_t> tokens;
    BlockOrigin origin;
};

struct PackedCorpus {
    std::vector<TrainingBlock> blocks;
    Vocabulary vocabulary;
    std::size_t total_tokens = 0; // n, before the remainder is dropped
};

/// Tokenizes files in path order, concatenates the streams and cuts
/// consecutive non-overlapping blocks of exactly block_length tokens. The
/// trailing remainder shorter than block_length is dropped.
PackedCorpus pack_training_blocks(const std::vector<SourceFile>& files, std::size_t block_length = 4096,
                                  const Tokenizer& tokenizer = default_tokenizer());

} // namespace coderag
