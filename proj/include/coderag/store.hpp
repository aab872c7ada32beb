#pragma once

#include "coderag/corpus.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace coderag {

inline constexpr int kFormatVersion = 1;

/// First record of every line-delimited store.
struct StoreHeader {
    int format_version = kFormatVersion;
    std::string store; // "files", "units", "benchmark", "blocks"
    std::string tokenizer_id;
    std::optional<std::size_t> window;
    std::optional<std::size_t> stride;
    nlohmann::json extra = nlohmann::json::object(); // store-specific fields

    nlohmann::json to_json() const;
    static StoreHeader from_json(const nlohmann::json& j);
};

/// Writes a header line followed by one compact JSON record per line.
class JsonlWriter {
public:
    JsonlWriter(const std::filesystem::path& path, const nlohmann::json& header);
    void write(const nlohmann::json& record);
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

struct JsonlContents {
    nlohmann::json header;
    std::vector<nlohmann::json> records;
};

/// Reads a line-delimited store. Throws FormatError when the header is
/// missing, the format version differs from kFormatVersion, or (when
/// expected_kind is non-empty) the header's kind field does not match.
JsonlContents read_jsonl(const std::filesystem::path& path, const std::string& kind_field = "store",
                         const std::string& expected_kind = {});

nlohmann::json to_json(const SourceFile& f);
SourceFile source_file_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RetrievalUnit& u);
RetrievalUnit unit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CompletionInstance& c);
CompletionInstance instance_from_json(const nlohmann::json& j);

void write_file_store(const std::filesystem::path& path, const std::vector<SourceFile>& files,
                      std::string_view tokenizer_id);
std::vector<SourceFile> read_file_store(const std::filesystem::path& path);

void write_unit_store(const std::filesystem::path& path, const std::vector<RetrievalUnit>& units,
                      std::string_view tokenizer_id);
std::vector<RetrievalUnit> read_unit_store(const std::filesystem::path& path);

struct BenchmarkStore {
    StoreHeader header;
    std::vector<CompletionInstance> instances;
};

void write_benchmark_store(const std::filesystem::path& path, const std::vector<CompletionInstance>& instances,
                           std::string_view tokenizer_id, std::size_t window, std::size_t stride);
BenchmarkStore read_benchmark_store(const std::filesystem::path& path);

/// Records are `{tokens:[...], origin:{...}}`; the vocabulary is written to
/// a sibling `<path>.vocab.json` so an external trainer can decode ids.
void write_training_blocks(const std::filesystem::path& path, const PackedCorpus& packed, std::size_t block_length,
                           std::string_view tokenizer_id);

std::string hash_to_hex(std::uint64_t h);
std::uint64_t hash_from_hex(const std::string& s);

} // namespace coderag
