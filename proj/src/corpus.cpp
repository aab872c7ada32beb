#include "coderag/corpus.hpp"

#include "coderag/error.hpp"
#include "coderag/lexer.hpp"
#include "coderag/sampling.hpp"
#include "coderag/text.hpp"
#include "parallel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace coderag {

namespace fs = std::filesystem;

SourceFile make_source_file(std::string path, std::string content, const Tokenizer& tokenizer) {
    SourceFile f;
    f.line_count = text::split_lines(content).size();
    f.token_count = tokenizer.count(content);
    f.content_hash = text::fnv1a64(text::normalize_whitespace(content));
    f.path = std::move(path);
    f.content = std::move(content);
    return f;
}

void FilterConfig::validate() const {
    if (max_define_body_chars == 0) throw DataError("max_define_body_chars must be positive");
    if (!(max_nonascii_comment_ratio > 0.0) || max_nonascii_comment_ratio > 1.0) {
        throw DataError("max_nonascii_comment_ratio must be in (0, 1]");
    }
}

namespace {

double ratio_from_comments(const std::vector<std::string_view>& comments) {
    std::size_t total = 0;
    std::size_t non_ascii = 0;
    for (auto c : comments) {
        for (char32_t cp : text::decode_utf8(c)) {
            if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' || cp == U'\f') {
                continue;
            }
            ++total;
            if (cp >= 0x80) ++non_ascii;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(non_ascii) / static_cast<double>(total);
}

std::size_t longest_define(const std::vector<cfamily::Directive>& directives) {
    std::size_t longest = 0;
    for (const auto& d : directives) {
        longest = std::max(longest, text::utf8_length(cfamily::define_body(d.text)));
    }
    return longest;
}

bool has_marker(std::string_view haystack, const std::vector<std::string>& markers) {
    return std::any_of(markers.begin(), markers.end(),
                       [&](const std::string& m) { return !m.empty() && haystack.find(m) != std::string_view::npos; });
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

double nonascii_comment_ratio(std::string_view source) { return ratio_from_comments(cfamily::lex(source).comments); }

std::size_t longest_define_body(std::string_view source) { return longest_define(cfamily::lex(source).directives); }

FileVerdict classify_file(std::string_view path, std::string_view bytes, const FilterConfig& cfg) {
    if (!text::is_valid_utf8(bytes)) return FileVerdict::unreadable;
    const std::string slash_path = "/" + std::string(path);
    if (has_marker(slash_path, cfg.generated_path_markers) ||
        has_marker(bytes.substr(0, FilterConfig::kGeneratedHeaderBytes), cfg.generated_content_markers)) {
        return FileVerdict::generated;
    }
    const auto lexed = cfamily::lex(bytes);
    if (longest_define(lexed.directives) > cfg.max_define_body_chars) return FileVerdict::long_define;
    if (ratio_from_comments(lexed.comments) > cfg.max_nonascii_comment_ratio) return FileVerdict::comment_heavy;
    return FileVerdict::keep;
}

IngestResult ingest(const fs::path& root, const FilterConfig& cfg, const Tokenizer& tokenizer) {
    cfg.validate();
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw DataError("corpus root '" + root.string() + "' is not a readable directory");

    std::vector<std::string> extensions;
    for (const auto& e : cfg.extensions) extensions.push_back(lowercase(e));

    std::vector<std::string> paths;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw DataError("cannot read corpus root '" + root.string() + "': " + ec.message());
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) {
            spdlog::warn("ingest: {}", ec.message());
            ec.clear();
            continue;
        }
        const auto& entry = *it;
        const std::string fname = entry.path().filename().string();
        if (entry.is_directory(ec)) {
            if (!fname.empty() && fname[0] == '.') it.disable_recursion_pending();
            continue;
        }
        if (!entry.is_regular_file(ec)) continue;
        const std::string ext = lowercase(entry.path().extension().string());
        if (std::find(extensions.begin(), extensions.end(), ext) == extensions.end()) continue;
        paths.push_back(fs::relative(entry.path(), root, ec).generic_string());
    }
    std::sort(paths.begin(), paths.end());

    struct Slot {
        FileVerdict verdict = FileVerdict::unreadable;
        SourceFile file;
    };
    std::vector<Slot> slots(paths.size());
    detail::parallel_for(paths.size(), cfg.threads, [&](std::size_t i) {
        std::ifstream in(root / paths[i], std::ios::binary);
        if (!in) return;
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (in.bad()) return;
        slots[i].verdict = classify_file(paths[i], bytes, cfg);
        if (slots[i].verdict == FileVerdict::keep) {
            slots[i].file = make_source_file(paths[i], std::move(bytes), tokenizer);
        }
    });

    IngestResult result;
    std::unordered_map<std::uint64_t, std::size_t> first_with_hash; // hash -> index in result.files
    for (auto& slot : slots) {
        switch (slot.verdict) {
        case FileVerdict::unreadable: ++result.report.removed_unreadable; continue;
        case FileVerdict::generated: ++result.report.removed_generated; continue;
        case FileVerdict::long_define: ++result.report.removed_long_define; continue;
        case FileVerdict::comment_heavy: ++result.report.removed_comment_heavy; continue;
        case FileVerdict::keep: break;
        }
        auto [pos, inserted] = first_with_hash.try_emplace(slot.file.content_hash, result.files.size());
        if (!inserted &&
            text::normalize_whitespace(result.files[pos->second].content) == text::normalize_whitespace(slot.file.content)) {
            ++result.report.removed_duplicate;
            continue;
        }
        result.files.push_back(std::move(slot.file));
    }
    result.report.kept = result.files.size();
    return result;
}

CorpusSplit split_corpus(const std::vector<SourceFile>& files, double test_fraction, std::uint64_t seed) {
    if (test_fraction < 0.0 || test_fraction >= 1.0) throw DataError("test fraction must be in [0, 1)");
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(files.size())));
    std::vector<bool> is_test(files.size(), false);
    for (std::size_t idx : sample_without_replacement(files.size(), n_test, seed)) is_test[idx] = true;
    CorpusSplit split;
    for (std::size_t i = 0; i < files.size(); ++i) (is_test[i] ? split.test : split.retrieval).push_back(files[i]);
    return split;
}

SegmentOutcome segment(const SourceFile& file, UnitId first_id, const Tokenizer& tokenizer, const Grammar& grammar) {
    SegmentOutcome out;
    const auto lines = text::split_lines(file.content);
    if (lines.empty()) return out;

    auto make_unit = [&](UnitKind kind, std::string name, std::size_t first, std::size_t last) {
        RetrievalUnit u;
        u.id = first_id + out.units.size();
        u.source_path = file.path;
        u.kind = kind;
        if (!name.empty()) u.name = std::move(name);
        u.start_line = first;
        u.end_line = last;
        u.content = text::join_lines(lines, first, last);
        u.token_count = tokenizer.count(u.content);
        out.units.push_back(std::move(u));
    };

    const DefinitionScan scan = grammar.scan_definitions(file.content);
    if (!scan.ok) {
        out.fell_back = true;
        out.warning = file.path + ": " + scan.error + "; indexing as a whole file";
        make_unit(UnitKind::whole_file, {}, 1, lines.size());
        return out;
    }
    if (!scan.has_function_definition || scan.definitions.empty()) {
        make_unit(UnitKind::whole_file, {}, 1, lines.size());
        return out;
    }
    for (const auto& d : scan.definitions) {
        make_unit(d.kind, d.name, d.start_line, std::min(d.end_line, lines.size()));
    }
    return out;
}

std::vector<RetrievalUnit> segment_corpus(const std::vector<SourceFile>& files, const Tokenizer& tokenizer,
                                          const Grammar& grammar) {
    std::vector<SegmentOutcome> outcomes(files.size());
    detail::parallel_for(files.size(), 0, [&](std::size_t i) { outcomes[i] = segment(files[i], 0, tokenizer, grammar); });
    std::vector<RetrievalUnit> units;
    for (auto& o : outcomes) {
        if (o.fell_back) spdlog::warn("segment: {}", o.warning);
        for (auto& u : o.units) {
            u.id = units.size();
            units.push_back(std::move(u));
        }
    }
    return units;
}

bool is_single_symbol(std::string_view line) {
    const auto t = text::trim(line);
    if (text::utf8_length(t) <= 1) return true;
    return std::all_of(t.begin(), t.end(), [](char c) {
        const auto u = static_cast<unsigned char>(c);
        return u < 0x80U && std::ispunct(u) != 0;
    });
}

TargetVerdict classify_target(std::string_view line, std::uint8_t line_flags, bool have_flags) {
    const auto t = text::trim(line);
    if (t.empty()) return TargetVerdict::blank;
    if (have_flags) {
        if ((line_flags & cfamily::kLineHasComment) != 0 && (line_flags & cfamily::kLineHasCode) == 0) {
            return TargetVerdict::comment_only;
        }
    } else if (t.starts_with("//") || t.starts_with("/*") || t.starts_with("*")) {
        return TargetVerdict::comment_only;
    }
    if (is_single_symbol(t)) return TargetVerdict::single_symbol;
    return TargetVerdict::keep;
}

std::vector<CompletionInstance> make_benchmark(const std::vector<SourceFile>& files, const BenchmarkOptions& options,
                                               const Tokenizer& tokenizer, BenchmarkStats* stats) {
    if (options.window == 0) throw DataError("benchmark window must be at least 1");
    if (options.stride == 0) throw DataError("benchmark stride must be at least 1");

    std::vector<const SourceFile*> ordered;
    ordered.reserve(files.size());
    for (const auto& f : files) ordered.push_back(&f);
    std::sort(ordered.begin(), ordered.end(), [](const SourceFile* a, const SourceFile* b) { return a->path < b->path; });

    BenchmarkStats local;
    std::vector<CompletionInstance> all;
    const std::size_t w = options.window;
    for (const SourceFile* f : ordered) {
        const auto lines = text::split_lines(f->content);
        if (lines.size() < w + 1) continue;
        const auto lexed = cfamily::lex(f->content);
        for (std::size_t s = 0; s + w < lines.size(); s += options.stride) {
            ++local.candidates;
            const std::size_t target_idx = s + w;
            const auto verdict = classify_target(lines[target_idx], lexed.line_flags[target_idx], lexed.ok);
            if (verdict == TargetVerdict::blank) {
                ++local.filtered_blank;
                continue;
            }
            if (verdict == TargetVerdict::single_symbol) {
                ++local.filtered_single_symbol;
                continue;
            }
            if (verdict == TargetVerdict::comment_only) {
                ++local.filtered_comment;
                continue;
            }
            CompletionInstance inst;
            inst.id = all.size();
            inst.source_path = f->path;
            inst.target_line = target_idx + 1;
            for (std::size_t l = s; l < target_idx; ++l) {
                inst.context.append(lines[l]);
                inst.context.push_back('\n');
            }
            inst.target = std::string(lines[target_idx]);
            inst.context_token_count = tokenizer.count(inst.context);
            all.push_back(std::move(inst));
        }
    }
    local.after_filter = all.size();

    std::vector<CompletionInstance> result;
    if (options.sample) {
        auto picked = sample_without_replacement(all.size(), options.sample->count, options.sample->seed);
        std::sort(picked.begin(), picked.end());
        result.reserve(picked.size());
        for (std::size_t idx : picked) result.push_back(std::move(all[idx]));
    } else {
        result = std::move(all);
    }
    local.sampled = result.size();
    if (stats != nullptr) *stats = local;
    return result;
}

PackedCorpus pack_training_blocks(const std::vector<SourceFile>& files, std::size_t block_length,
                                  const Tokenizer& tokenizer) {
    if (block_length < 2) throw DataError("training block length must be at least 2");
    std::vector<const SourceFile*> ordered;
    for (const auto& f : files) ordered.push_back(&f);
    std::sort(ordered.begin(), ordered.end(), [](const SourceFile* a, const SourceFile* b) { return a->path < b->path; });

    PackedCorpus packed;
    TrainingBlock current;
    current.tokens.reserve(block_length);
    for (const SourceFile* f : ordered) {
        for (const TokenSpan& sp : tokenizer.spans(f->content)) {
            if (current.tokens.empty()) {
                current.origin.first_path = f->path;
                current.origin.first_byte = sp.begin;
            }
            current.tokens.push_back(packed.vocabulary.id_of(std::string_view(f->content).substr(sp.begin, sp.end - sp.begin)));
            ++packed.total_tokens;
            if (current.tokens.size() == block_length) {
                current.origin.last_path = f->path;
                current.origin.last_byte_end = sp.end;
                packed.blocks.push_back(std::move(current));
                current = TrainingBlock{};
                current.tokens.reserve(block_length);
            }
        }
    }
    return packed;
}

} // namespace coderag
