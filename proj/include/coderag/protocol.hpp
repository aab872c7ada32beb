#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

/// JSON bodies of the embedding and completion wire protocol.
///
///   POST /embed     {model, texts:[string]}          -> {vectors:[[number]], dims, model}
///   POST /complete  {prompt, max_tokens, temperature, stop}
///                                                    -> {text, usage:{prompt_tokens, completion_tokens}}
///   GET  /health                                     -> {status:"ok", model}
///
/// Parsers throw ProtocolError on any schema violation.
namespace coderag::protocol {

struct EmbedRequest {
    std::string model;
    std::vector<std::string> texts;
};

struct EmbedResponse {
    std::vector<std::vector<double>> vectors;
    std::size_t dims = 0;
    std::string model;
};

struct CompleteRequest {
    std::string prompt;
    int max_tokens = 512;
    double temperature = 0.0;
    std::vector<std::string> stop;
};

struct CompleteResponse {
    std::string text;
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
    std::optional<double> server_latency_ms;
};

struct Health {
    std::string status;
    std::string model;
};

nlohmann::json to_json(const EmbedRequest& r);
nlohmann::json to_json(const EmbedResponse& r);
nlohmann::json to_json(const CompleteRequest& r);
nlohmann::json to_json(const CompleteResponse& r);
nlohmann::json to_json(const Health& h);

EmbedRequest parse_embed_request(const nlohmann::json& j);
/// Also checks that every vector has `dims` entries.
EmbedResponse parse_embed_response(const nlohmann::json& j);
CompleteRequest parse_complete_request(const nlohmann::json& j);
CompleteResponse parse_complete_response(const nlohmann::json& j);
Health parse_health(const nlohmann::json& j);

/// Parses a body, turning JSON syntax errors into ProtocolError.
nlohmann::json parse_body(const std::string& body);

/// One fixture of the embedding conformance suite.
struct ConformanceCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ConformanceOptions {
    std::string endpoint;            // http://host:port[/prefix]
    std::string model;               // empty: take the name reported by /health
    std::size_t dims = 0;            // 0: accept whatever the server reports
    double norm_tolerance = 1e-5;
    double determinism_tolerance = 1e-6;
    int timeout_ms = 30000;
};

/// Runs the wire-protocol fixtures (health, schema, dims, unit norm, order
/// preservation, determinism, rejection of bad requests) against a live
/// embedding server.
std::vector<ConformanceCheck> check_embedding_server(const ConformanceOptions& options);

} // namespace coderag::protocol
