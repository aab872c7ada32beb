#include "coderag/store.hpp"

#include "coderag/error.hpp"

#include <cinttypes>
#include <cstdio>

namespace coderag {

using nlohmann::json;
namespace fs = std::filesystem;

json StoreHeader::to_json() const {
    json j = extra;
    j["format_version"] = format_version;
    j["store"] = store;
    j["tokenizer_id"] = tokenizer_id;
    j["window"] = window ? json(*window) : json(nullptr);
    j["stride"] = stride ? json(*stride) : json(nullptr);
    return j;
}

StoreHeader StoreHeader::from_json(const json& j) {
    StoreHeader h;
    h.format_version = j.at("format_version").get<int>();
    h.store = j.value("store", "");
    h.tokenizer_id = j.value("tokenizer_id", "");
    if (j.contains("window") && !j["window"].is_null()) h.window = j["window"].get<std::size_t>();
    if (j.contains("stride") && !j["stride"].is_null()) h.stride = j["stride"].get<std::size_t>();
    h.extra = j;
    for (const char* k : {"format_version", "store", "tokenizer_id", "window", "stride"}) h.extra.erase(k);
    return h;
}

JsonlWriter::JsonlWriter(const fs::path& path, const json& header) : path_(path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw DataError("cannot write '" + path.string() + "'");
    write(header);
}

void JsonlWriter::write(const json& record) {
    out_ << record.dump() << '\n';
    if (!out_) throw DataError("write failed on '" + path_.string() + "'");
}

void JsonlWriter::close() {
    out_.close();
    if (out_.fail()) throw DataError("cannot finish writing '" + path_.string() + "'");
}

JsonlContents read_jsonl(const fs::path& path, const std::string& kind_field, const std::string& expected_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read '" + path.string() + "'");
    JsonlContents out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (lineno == 1) {
            if (!j.is_object() || !j.contains("format_version")) {
                throw FormatError(path.string() + ": missing header record");
            }
            if (j["format_version"] != kFormatVersion) {
                throw FormatError(path.string() + ": format_version " + j["format_version"].dump() +
                                  " is not supported (expected " + std::to_string(kFormatVersion) + ")");
            }
            if (!expected_kind.empty() && j.value(kind_field, "") != expected_kind) {
                throw FormatError(path.string() + ": expected a '" + expected_kind + "' file, found '" +
                                  j.value(kind_field, "") + "'");
            }
            out.header = std::move(j);
            continue;
        }
        out.records.push_back(std::move(j));
    }
    if (lineno == 0) throw FormatError(path.string() + ": empty file");
    return out;
}

std::string hash_to_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::uint64_t hash_from_hex(const std::string& s) { return std::stoull(s, nullptr, 16); }

json to_json(const SourceFile& f) {
    return {{"path", f.path},
            {"content", f.content},
            {"line_count", f.line_count},
            {"token_count", f.token_count},
            {"content_hash", hash_to_hex(f.content_hash)}};
}

SourceFile source_file_from_json(const json& j) {
    SourceFile f;
    f.path = j.at("path").get<std::string>();
    f.content = j.at("content").get<std::string>();
    f.line_count = j.at("line_count").get<std::size_t>();
    f.token_count = j.at("token_count").get<std::size_t>();
    f.content_hash = hash_from_hex(j.at("content_hash").get<std::string>());
    return f;
}

json to_json(const RetrievalUnit& u) {
    return {{"id", u.id},
            {"source_path", u.source_path},
            {"kind", to_string(u.kind)},
            {"name", u.name ? json(*u.name) : json(nullptr)},
            {"start_line", u.start_line},
            {"end_line", u.end_line},
            {"content", u.content},
            {"token_count", u.token_count}};
}

RetrievalUnit unit_from_json(const json& j) {
    RetrievalUnit u;
    u.id = j.at("id").get<UnitId>();
    u.source_path = j.at("source_path").get<std::string>();
    u.kind = unit_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("name") && !j["name"].is_null()) u.name = j["name"].get<std::string>();
    u.start_line = j.at("start_line").get<std::size_t>();
    u.end_line = j.at("end_line").get<std::size_t>();
    u.content = j.at("content").get<std::string>();
    u.token_count = j.at("token_count").get<std::size_t>();
    return u;
}

json to_json(const CompletionInstance& c) {
    return {{"id", c.id},
            {"source_path", c.source_path},
            {"target_line", c.target_line},
            {"context", c.context},
            {"target", c.target},
            {"context_token_count", c.context_token_count}};
}

CompletionInstance instance_from_json(const json& j) {
    CompletionInstance c;
    c.id = j.at("id").get<InstanceId>();
    c.source_path = j.at("source_path").get<std::string>();
    c.target_line = j.value("target_line", std::size_t{0});
    c.context = j.at("context").get<std::string>();
    c.target = j.at("target").get<std::string>();
    c.context_token_count = j.value("context_token_count", std::size_t{0});
    return c;
}

namespace {

StoreHeader header_for(std::string store, std::string_view tokenizer_id) {
    StoreHeader h;
    h.store = std::move(store);
    h.tokenizer_id = std::string(tokenizer_id);
    return h;
}

} // namespace

void write_file_store(const fs::path& path, const std::vector<SourceFile>& files, std::string_view tokenizer_id) {
    JsonlWriter w(path, header_for("files", tokenizer_id).to_json());
    for (const auto& f : files) w.write(to_json(f));
    w.close();
}

std::vector<SourceFile> read_file_store(const fs::path& path) {
    auto contents = read_jsonl(path, "store", "files");
    std::vector<SourceFile> files;
    files.reserve(contents.records.size());
    for (const auto& r : contents.records) files.push_back(source_file_from_json(r));
    return files;
}

void write_unit_store(const fs::path& path, const std::vector<RetrievalUnit>& units, std::string_view tokenizer_id) {
    JsonlWriter w(path, header_for("units", tokenizer_id).to_json());
    for (const auto& u : units) w.write(to_json(u));
    w.close();
}

std::vector<RetrievalUnit> read_unit_store(const fs::path& path) {
    auto contents = read_jsonl(path, "store", "units");
    std::vector<RetrievalUnit> units;
    units.reserve(contents.records.size());
    for (const auto& r : contents.records) units.push_back(unit_from_json(r));
    return units;
}

void write_benchmark_store(const fs::path& path, const std::vector<CompletionInstance>& instances,
                           std::string_view tokenizer_id, std::size_t window, std::size_t stride) {
    StoreHeader h = header_for("benchmark", tokenizer_id);
    h.window = window;
    h.stride = stride;
    JsonlWriter w(path, h.to_json());
    for (const auto& c : instances) w.write(to_json(c));
    w.close();
}

BenchmarkStore read_benchmark_store(const fs::path& path) {
    auto contents = read_jsonl(path, "store", "benchmark");
    BenchmarkStore store;
    store.header = StoreHeader::from_json(contents.header);
    for (const auto& r : contents.records) store.instances.push_back(instance_from_json(r));
    return store;
}

void write_training_blocks(const fs::path& path, const PackedCorpus& packed, std::size_t block_length,
                           std::string_view tokenizer_id) {
    StoreHeader h = header_for("blocks", tokenizer_id);
    h.extra["block_length"] = block_length;
    h.extra["total_tokens"] = packed.total_tokens;
    h.extra["vocab_size"] = packed.vocabulary.size();
    JsonlWriter w(path, h.to_json());
    for (const auto& b : packed.blocks) {
        w.write({{"tokens", b.tokens},
                 {"origin",
                  {{"first_path", b.origin.first_path},
                   {"first_byte", b.origin.first_byte},
                   {"last_path", b.origin.last_path},
                   {"last_byte_end", b.origin.last_byte_end}}}});
    }
    w.close();

    fs::path vocab_path = path;
    vocab_path += ".vocab.json";
    std::ofstream v(vocab_path, std::ios::binary | std::ios::trunc);
    if (!v) throw DataError("cannot write '" + vocab_path.string() + "'");
    v << json{{"format_version", kFormatVersion}, {"tokenizer_id", tokenizer_id}, {"tokens", packed.vocabulary.tokens()}}.dump()
      << '\n';
}

} // namespace coderag
