#include "coderag/providers.hpp"

#include "coderag/error.hpp"
#include "coderag/text.hpp"
#include "http_util.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <thread>

namespace coderag {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string read_token(const std::string& env) {
    if (env.empty()) return {};
    const char* v = std::getenv(env.c_str());
    return v ? std::string(v) : std::string();
}

/// RAII slot on a counting semaphore.
class Slot {
public:
    explicit Slot(std::counting_semaphore<>* s) : s_(s) {
        if (s_) s_->acquire();
    }
    ~Slot() {
        if (s_) s_->release();
    }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

private:
    std::counting_semaphore<>* s_;
};

std::unique_ptr<std::counting_semaphore<>> make_slots(std::size_t n) {
    return std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, n)));
}

/// POSTs a JSON body, retrying transport failures, 429 and 5xx. Other
/// non-200 answers are surfaced at once with the body verbatim.
json post_json(const detail::Endpoint& ep, const std::string& path, const json& body, int timeout_ms,
               const RetryPolicy& retry, const std::string& token) {
    const std::string payload = body.dump();
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    std::string last_error;
    int backoff = retry.initial_backoff_ms;
    const int attempts = std::max(1, retry.attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        auto client = detail::make_client(ep, timeout_ms);
        auto res = client->Post(ep.prefix + path, headers, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
        } else if (res->status == 200) {
            return protocol::parse_body(res->body);
        } else if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
        } else {
            throw ProviderError("POST " + path + " returned HTTP " + std::to_string(res->status) + ": " + res->body);
        }
        if (attempt < attempts) {
            spdlog::warn("POST {}{} failed ({}), retrying in {} ms", ep.origin, path, last_error, backoff);
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
    }
    throw ProviderError("POST " + ep.origin + ep.prefix + path + " failed after " + std::to_string(attempts) +
                        " attempts: " + last_error);
}

protocol::Health get_health(const detail::Endpoint& ep, int timeout_ms, const std::string& token) {
    auto client = detail::make_client(ep, timeout_ms);
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    auto res = client->Get(ep.prefix + "/health", headers);
    if (!res) throw ProviderError("GET " + ep.origin + ep.prefix + "/health failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw ProviderError("GET /health returned HTTP " + std::to_string(res->status));
    return protocol::parse_health(protocol::parse_body(res->body));
}

} // namespace

// ---- embeddings ----

void EmbeddingProviderConfig::validate() const {
    if (dims == 0) throw DataError("providers.embed_dims must be positive");
    if (batch_size == 0) throw DataError("providers.embed_batch_size must be at least 1");
}

EmbeddingVector mock_embed(std::string_view text, std::size_t dims, std::uint64_t seed) {
    if (dims < 8) throw DataError("mock embeddings need at least 8 dims");
    auto terms = tokenize_for_index(text);
    if (terms.empty()) throw DataError("cannot embed a text without terms");
    std::vector<double> v(dims, 0.0);
    for (const auto& t : terms) v[text::fnv1a64(t, seed) % dims] += 1.0;
    return EmbeddingVector::normalized(std::move(v));
}

MockEmbeddingProvider::MockEmbeddingProvider(std::size_t dims, std::uint64_t seed) : dims_(dims), seed_(seed) {
    if (dims_ < 8) throw DataError("mock embeddings need at least 8 dims");
}

std::vector<EmbeddingVector> MockEmbeddingProvider::embed_batch(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(mock_embed(t, dims_, seed_));
    return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(EmbeddingProviderConfig cfg)
    : cfg_(std::move(cfg)), token_(read_token(cfg_.token_env)) {
    cfg_.validate();
    detail::parse_endpoint(cfg_.endpoint);
}

protocol::Health HttpEmbeddingProvider::health() const {
    return get_health(detail::parse_endpoint(cfg_.endpoint), cfg_.timeout_ms, token_);
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_batch(const std::vector<std::string>& texts) {
    const auto ep = detail::parse_endpoint(cfg_.endpoint);
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += cfg_.batch_size) {
        const std::size_t end = std::min(texts.size(), start + cfg_.batch_size);
        std::vector<std::size_t> indices;
        for (std::size_t i = start; i < end; ++i) indices.push_back(i);
        protocol::EmbedRequest req{cfg_.model_name, {texts.begin() + static_cast<std::ptrdiff_t>(start),
                                                     texts.begin() + static_cast<std::ptrdiff_t>(end)}};
        try {
            auto resp = protocol::parse_embed_response(
                post_json(ep, "/embed", protocol::to_json(req), cfg_.timeout_ms, cfg_.retry, token_));
            if (resp.dims != cfg_.dims) {
                throw ProtocolError("embedding dims " + std::to_string(resp.dims) + " do not match configured " +
                                    std::to_string(cfg_.dims));
            }
            if (resp.vectors.size() != req.texts.size()) {
                throw ProtocolError("sent " + std::to_string(req.texts.size()) + " texts, received " +
                                    std::to_string(resp.vectors.size()) + " vectors");
            }
            for (auto& v : resp.vectors) {
                try {
                    out.push_back(EmbeddingVector::normalized(std::move(v)));
                } catch (const DataError& e) {
                    throw ProtocolError(std::string("embedding server returned a bad vector: ") + e.what());
                }
            }
        } catch (const ProtocolError& e) {
            throw ProtocolError(e.what(), indices);
        } catch (const ProviderError& e) {
            throw ProviderError(e.what(), indices);
        }
    }
    return out;
}

// ---- completions ----

void CompletionRequest::validate() const {
    if (max_tokens < 1) throw DataError("max_tokens must be at least 1");
    if (temperature != 0.0) throw DataError("only greedy decoding (temperature 0) is supported");
}

CompletionResponse finish_mock_completion(const CompletionRequest& request, std::string text,
                                          const Tokenizer& tokenizer) {
    request.validate();
    std::size_t cut = text.size();
    for (const auto& s : request.stop) {
        if (s.empty()) continue;
        cut = std::min(cut, text.find(s));
    }
    text.resize(cut);
    auto spans = tokenizer.spans(text);
    const auto max_tokens = static_cast<std::size_t>(request.max_tokens);
    if (spans.size() > max_tokens) {
        text.resize(spans[max_tokens - 1].end);
        spans.resize(max_tokens);
    }
    CompletionResponse r;
    r.prompt_tokens = tokenizer.count(request.prompt);
    r.completion_tokens = spans.size();
    r.text = std::move(text);
    return r;
}

CompletionResponse ConstantCompletionProvider::complete(const CompletionRequest& request) {
    const auto start = Clock::now();
    auto r = finish_mock_completion(request, text_);
    r.latency_ms = ms_since(start);
    return r;
}

std::string copy_oracle_answer(std::string_view prompt, const CopyOracleConfig& cfg) {
    const auto lines = text::split_lines(prompt);
    if (cfg.window == 0 || lines.size() <= cfg.window) return cfg.sentinel;
    const std::size_t m = std::max<std::size_t>(1, std::min(cfg.match_lines, cfg.window));
    const std::size_t prefix_len = lines.size() - cfg.window;
    const std::size_t needle = lines.size() - m;
    if (prefix_len < m + 1) return cfg.sentinel;
    for (std::size_t i = prefix_len - m; i-- > 0;) {
        bool hit = true;
        for (std::size_t j = 0; j < m && hit; ++j) hit = lines[i + j] == lines[needle + j];
        if (hit) return std::string(lines[i + m]);
    }
    return cfg.sentinel;
}

CompletionResponse CopyOracleCompletionProvider::complete(const CompletionRequest& request) {
    const auto start = Clock::now();
    auto r = finish_mock_completion(request, copy_oracle_answer(request.prompt, cfg_));
    r.latency_ms = ms_since(start);
    return r;
}

double LatencyModel::latency_ms(std::size_t prompt_tokens, std::size_t completion_tokens) const {
    const double p = static_cast<double>(prompt_tokens);
    return base_ms + per_prompt_token_ms * p + per_prompt_token_sq_ms * p * p +
           per_completion_token_ms * static_cast<double>(completion_tokens);
}

LatencyModelCompletionProvider::LatencyModelCompletionProvider(std::shared_ptr<CompletionProvider> inner,
                                                               LatencyModel model)
    : inner_(std::move(inner)), model_(model) {
    if (!inner_) throw DataError("latency model needs an inner provider");
}

CompletionResponse LatencyModelCompletionProvider::complete(const CompletionRequest& request) {
    const auto start = Clock::now();
    auto r = inner_->complete(request);
    const auto deadline =
        start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double, std::milli>(
                    model_.latency_ms(r.prompt_tokens, r.completion_tokens)));
    std::this_thread::sleep_until(deadline);
    r.latency_ms = ms_since(start);
    return r;
}

HttpCompletionProvider::HttpCompletionProvider(CompletionProviderConfig cfg)
    : cfg_(std::move(cfg)), token_(read_token(cfg_.token_env)), slots_(make_slots(cfg_.max_in_flight)) {
    detail::parse_endpoint(cfg_.endpoint);
}

protocol::Health HttpCompletionProvider::health() const {
    return get_health(detail::parse_endpoint(cfg_.endpoint), cfg_.timeout_ms, token_);
}

CompletionResponse HttpCompletionProvider::complete(const CompletionRequest& request) {
    request.validate();
    Slot slot(slots_.get());
    const auto start = Clock::now();
    protocol::CompleteRequest wire{request.prompt, request.max_tokens, request.temperature, request.stop};
    auto resp = protocol::parse_complete_response(post_json(detail::parse_endpoint(cfg_.endpoint), "/complete",
                                                            protocol::to_json(wire), cfg_.timeout_ms, cfg_.retry,
                                                            token_));
    CompletionResponse r;
    r.text = std::move(resp.text);
    r.prompt_tokens = resp.prompt_tokens;
    r.completion_tokens = resp.completion_tokens;
    r.latency_ms = ms_since(start);
    return r;
}

} // namespace coderag
