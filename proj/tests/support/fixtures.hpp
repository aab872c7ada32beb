#pragma once

#include "coderag/corpus.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

namespace fixture {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "coderag") {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Lowercase letters spelling n in base 26, so every index gets its own word.
inline std::string letters(std::size_t n) {
    std::string s;
    do {
        s.insert(s.begin(), static_cast<char>('a' + n % 26));
        n /= 26;
    } while (n > 0);
    return "q" + s; // never collides with C keywords
}

/// A 25-line function whose identifiers are unique to `tag`.
inline std::string unique_function(const std::string& tag, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::string s = "int compute" + tag + "(int seed" + tag + ") {\n";
    s += "    int acc" + tag + "_0 = seed" + tag + " * " + std::to_string(rng() % 90 + 10) + " + 3;\n";
    for (int j = 1; j <= 22; ++j) {
        s += "    int acc" + tag + "_" + std::to_string(j) + " = acc" + tag + "_" + std::to_string(j - 1) + " * " +
             std::to_string(rng() % 90 + 10) + " + " + std::to_string(rng() % 9 + 1) + ";\n";
    }
    s += "    return acc" + tag + "_22;\n}\n";
    return s;
}

struct CopyOracleCorpus {
    std::vector<coderag::SourceFile> retrieval;   // repo/file_<i>.cpp
    std::vector<coderag::SourceFile> benchmark;   // bench/file_<i>.cpp, same text as the retrieval file
    std::vector<coderag::SourceFile> distractors; // noise/file_<i>.cpp, no line shared with the others
};

/// Every benchmark continuation appears verbatim inside exactly one
/// retrieval unit (the function in the matching repo file).
inline CopyOracleCorpus copy_oracle_corpus(std::size_t files, std::uint64_t seed = 7) {
    CopyOracleCorpus c;
    for (std::size_t i = 0; i < files; ++i) {
        const std::string body = unique_function(letters(i), seed + i);
        const std::string num = std::to_string(100000 + i).substr(1);
        c.retrieval.push_back(coderag::make_source_file("repo/file_" + num + ".cpp", body));
        c.benchmark.push_back(coderag::make_source_file("bench/file_" + num + ".cpp", body));
        c.distractors.push_back(
            coderag::make_source_file("noise/file_" + num + ".cpp", unique_function("z" + letters(i), seed * 31 + i)));
    }
    return c;
}

} // namespace fixture
