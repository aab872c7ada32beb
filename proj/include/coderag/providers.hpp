#pragma once

#include "coderag/protocol.hpp"
#include "coderag/retrieval.hpp"
#include "coderag/tokenizer.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

namespace coderag {

inline constexpr std::string_view kDefaultTokenEnv = "CODERAG_API_TOKEN";

struct RetryPolicy {
    int attempts = 3;
    int initial_backoff_ms = 100; // doubled after every failed attempt
};

struct EmbeddingProviderConfig {
    std::string endpoint = "http://127.0.0.1:8080";
    std::string model_name = "mock-hash";
    std::size_t dims = 256;
    std::size_t batch_size = 32;
    int timeout_ms = 30000;
    RetryPolicy retry;
    std::size_t max_in_flight = 8;
    std::string token_env = std::string(kDefaultTokenEnv);
    std::uint64_t mock_seed = 0;

    /// Throws DataError when dims or batch_size is zero.
    void validate() const;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    /// One unit-norm vector per text, in input order.
    virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) = 0;
    virtual std::size_t dims() const = 0;
    virtual std::string model() const = 0;
};

/// Seeded hashed bag of terms: every index term adds its frequency to
/// coordinate hash(term, seed) mod dims, and the result is L2-normalized.
/// Throws DataError when dims < 8 or the text has no terms.
EmbeddingVector mock_embed(std::string_view text, std::size_t dims, std::uint64_t seed);

class MockEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit MockEmbeddingProvider(std::size_t dims = 256, std::uint64_t seed = 0);
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;
    std::size_t dims() const override { return dims_; }
    std::string model() const override { return "mock-hash"; }

private:
    std::size_t dims_;
    std::uint64_t seed_;
};

/// Client for POST /embed. Splits input into batch_size requests, retries
/// transport failures and 5xx answers, checks dims and normalizes vectors.
/// Failures surface as ProviderError carrying the failing text indices.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(EmbeddingProviderConfig cfg);
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;
    std::size_t dims() const override { return cfg_.dims; }
    std::string model() const override { return cfg_.model_name; }
    protocol::Health health() const;

private:
    EmbeddingProviderConfig cfg_;
    std::string token_;
};

struct CompletionRequest {
    std::string prompt;
    int max_tokens = 512;
    double temperature = 0.0; // greedy decoding only
    std::vector<std::string> stop;

    /// Throws DataError unless max_tokens >= 1 and temperature == 0.
    void validate() const;
};

struct CompletionResponse {
    std::string text;
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
    double latency_ms = 0.0; // measured by the client
};

class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual CompletionResponse complete(const CompletionRequest& request) = 0;
    virtual std::string model() const = 0;
};

/// Shared post-processing for mocks: cut at the first stop string, keep at
/// most max_tokens tokens and fill usage from the tokenizer.
CompletionResponse finish_mock_completion(const CompletionRequest& request, std::string text,
                                          const Tokenizer& tokenizer = default_tokenizer());

class ConstantCompletionProvider final : public CompletionProvider {
public:
    explicit ConstantCompletionProvider(std::string text) : text_(std::move(text)) {}
    CompletionResponse complete(const CompletionRequest& request) override;
    std::string model() const override { return "mock-constant"; }

private:
    std::string text_;
};

struct CopyOracleConfig {
    std::size_t window = 20;     // lines in the query suffix of every prompt
    std::size_t match_lines = 3; // query tail lines that must match inside a retrieved unit
    std::string sentinel = "/*copy-oracle:no-match*/";
};

/// Test double for a perfectly grounded model. The prompt's last `window`
/// lines are the query; the oracle looks for the query's final
/// `match_lines` lines in the text before it and answers with the line
/// that follows their last occurrence, or the sentinel when there is none.
std::string copy_oracle_answer(std::string_view prompt, const CopyOracleConfig& cfg);

class CopyOracleCompletionProvider final : public CompletionProvider {
public:
    explicit CopyOracleCompletionProvider(CopyOracleConfig cfg = {}) : cfg_(std::move(cfg)) {}
    CompletionResponse complete(const CompletionRequest& request) override;
    std::string model() const override { return "mock-copy-oracle"; }

private:
    CopyOracleConfig cfg_;
};

/// Simulated serving cost, in milliseconds, for a request with P prompt
/// tokens and C completion tokens:
///   base + per_prompt_token * P + per_prompt_token_sq * P^2 + per_completion_token * C
struct LatencyModel {
    double base_ms = 0.0;
    double per_prompt_token_ms = 0.0;
    double per_prompt_token_sq_ms = 0.0;
    double per_completion_token_ms = 0.0;

    double latency_ms(std::size_t prompt_tokens, std::size_t completion_tokens) const;
};

/// Wraps another provider and sleeps for the modeled latency.
class LatencyModelCompletionProvider final : public CompletionProvider {
public:
    LatencyModelCompletionProvider(std::shared_ptr<CompletionProvider> inner, LatencyModel model);
    CompletionResponse complete(const CompletionRequest& request) override;
    std::string model() const override { return inner_->model(); }

private:
    std::shared_ptr<CompletionProvider> inner_;
    LatencyModel model_;
};

struct CompletionProviderConfig {
    std::string endpoint = "http://127.0.0.1:8081";
    std::string model_name = "completion";
    int timeout_ms = 120000;
    RetryPolicy retry;
    std::size_t max_in_flight = 8;
    std::string token_env = std::string(kDefaultTokenEnv);
};

/// Client for POST /complete. Safe for concurrent use; at most
/// max_in_flight requests are outstanding at once.
class HttpCompletionProvider final : public CompletionProvider {
public:
    explicit HttpCompletionProvider(CompletionProviderConfig cfg);
    CompletionResponse complete(const CompletionRequest& request) override;
    std::string model() const override { return cfg_.model_name; }
    protocol::Health health() const;

private:
    CompletionProviderConfig cfg_;
    std::string token_;
    std::unique_ptr<std::counting_semaphore<>> slots_;
};

} // namespace coderag
