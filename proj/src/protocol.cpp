#include "coderag/protocol.hpp"

#include "coderag/error.hpp"
#include "http_util.hpp"

#include <cmath>

namespace coderag::protocol {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw ProtocolError("protocol violation: " + what); }

const json& field(const json& j, const char* name) {
    if (!j.is_object()) bad("body is not a JSON object");
    auto it = j.find(name);
    if (it == j.end()) bad(std::string("missing field '") + name + "'");
    return *it;
}

std::string string_field(const json& j, const char* name) {
    const auto& v = field(j, name);
    if (!v.is_string()) bad(std::string("field '") + name + "' must be a string");
    return v.get<std::string>();
}

std::size_t count_field(const json& j, const char* name) {
    const auto& v = field(j, name);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        bad(std::string("field '") + name + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

} // namespace

json to_json(const EmbedRequest& r) { return {{"model", r.model}, {"texts", r.texts}}; }

json to_json(const EmbedResponse& r) { return {{"vectors", r.vectors}, {"dims", r.dims}, {"model", r.model}}; }

json to_json(const CompleteRequest& r) {
    return {{"prompt", r.prompt}, {"max_tokens", r.max_tokens}, {"temperature", r.temperature}, {"stop", r.stop}};
}

json to_json(const CompleteResponse& r) {
    json j = {{"text", r.text},
              {"usage", {{"prompt_tokens", r.prompt_tokens}, {"completion_tokens", r.completion_tokens}}}};
    if (r.server_latency_ms) j["latency_ms"] = *r.server_latency_ms;
    return j;
}

json to_json(const Health& h) { return {{"status", h.status}, {"model", h.model}}; }

EmbedRequest parse_embed_request(const json& j) {
    EmbedRequest r;
    r.model = string_field(j, "model");
    const auto& texts = field(j, "texts");
    if (!texts.is_array()) bad("field 'texts' must be an array");
    for (const auto& t : texts) {
        if (!t.is_string()) bad("every entry of 'texts' must be a string");
        r.texts.push_back(t.get<std::string>());
    }
    return r;
}

EmbedResponse parse_embed_response(const json& j) {
    EmbedResponse r;
    r.model = string_field(j, "model");
    r.dims = count_field(j, "dims");
    const auto& vectors = field(j, "vectors");
    if (!vectors.is_array()) bad("field 'vectors' must be an array");
    for (const auto& v : vectors) {
        if (!v.is_array()) bad("every vector must be an array of numbers");
        std::vector<double> values;
        values.reserve(v.size());
        for (const auto& x : v) {
            if (!x.is_number()) bad("every vector must be an array of numbers");
            values.push_back(x.get<double>());
        }
        if (values.size() != r.dims) {
            bad("vector of length " + std::to_string(values.size()) + " but dims is " + std::to_string(r.dims));
        }
        r.vectors.push_back(std::move(values));
    }
    return r;
}

CompleteRequest parse_complete_request(const json& j) {
    CompleteRequest r;
    r.prompt = string_field(j, "prompt");
    if (j.contains("max_tokens")) {
        const auto& m = j["max_tokens"];
        if (!m.is_number_integer() || m.get<long long>() < 1) bad("'max_tokens' must be a positive integer");
        r.max_tokens = m.get<int>();
    }
    if (j.contains("temperature")) {
        if (!j["temperature"].is_number()) bad("'temperature' must be a number");
        r.temperature = j["temperature"].get<double>();
    }
    if (j.contains("stop") && !j["stop"].is_null()) {
        if (!j["stop"].is_array()) bad("'stop' must be an array of strings");
        for (const auto& s : j["stop"]) {
            if (!s.is_string()) bad("'stop' must be an array of strings");
            r.stop.push_back(s.get<std::string>());
        }
    }
    return r;
}

CompleteResponse parse_complete_response(const json& j) {
    CompleteResponse r;
    r.text = string_field(j, "text");
    const auto& usage = field(j, "usage");
    r.prompt_tokens = count_field(usage, "prompt_tokens");
    r.completion_tokens = count_field(usage, "completion_tokens");
    if (j.contains("latency_ms") && j["latency_ms"].is_number()) r.server_latency_ms = j["latency_ms"].get<double>();
    return r;
}

Health parse_health(const json& j) {
    Health h;
    h.status = string_field(j, "status");
    h.model = string_field(j, "model");
    return h;
}

json parse_body(const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("response is not valid JSON: ") + e.what());
    }
}

// ---- conformance ----

namespace {

class Probe {
public:
    explicit Probe(const ConformanceOptions& o)
        : endpoint_(detail::parse_endpoint(o.endpoint)), client_(detail::make_client(endpoint_, o.timeout_ms)) {}

    httplib::Result get(const std::string& path) { return client_->Get(endpoint_.prefix + path); }
    httplib::Result post(const std::string& path, const std::string& body) {
        return client_->Post(endpoint_.prefix + path, body, "application/json");
    }

    EmbedResponse embed(const std::string& model, const std::vector<std::string>& texts) {
        auto res = post("/embed", to_json(EmbedRequest{model, texts}).dump());
        if (!res) throw ProviderError("request failed: " + httplib::to_string(res.error()));
        if (res->status != 200) throw ProtocolError("HTTP " + std::to_string(res->status) + ": " + res->body);
        auto r = parse_embed_response(parse_body(res->body));
        if (r.vectors.size() != texts.size()) {
            throw ProtocolError("sent " + std::to_string(texts.size()) + " texts, got " +
                                std::to_string(r.vectors.size()) + " vectors");
        }
        return r;
    }

private:
    detail::Endpoint endpoint_;
    std::unique_ptr<httplib::Client> client_;
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return INFINITY;
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

template <class Fn>
void run(std::vector<ConformanceCheck>& out, const std::string& name, Fn&& fn) {
    ConformanceCheck c{name, false, {}};
    try {
        c.detail = fn();
        c.passed = c.detail.empty();
    } catch (const std::exception& e) {
        c.detail = e.what();
    }
    out.push_back(std::move(c));
}

} // namespace

std::vector<ConformanceCheck> check_embedding_server(const ConformanceOptions& options) {
    Probe probe(options);
    std::vector<ConformanceCheck> out;
    std::string model = options.model;

    run(out, "health", [&]() -> std::string {
        auto res = probe.get("/health");
        if (!res) return "GET /health failed: " + httplib::to_string(res.error());
        if (res->status != 200) return "GET /health returned HTTP " + std::to_string(res->status);
        auto h = parse_health(parse_body(res->body));
        if (h.status != "ok") return "status is '" + h.status + "'";
        if (model.empty()) model = h.model;
        if (h.model != model) return "model is '" + h.model + "', expected '" + model + "'";
        return {};
    });

    const std::vector<std::string> texts = {"int add(int a, int b) { return a + b; }", "a",
                                            "std::vector<int> v; v.push_back(1);", "a"};
    std::optional<EmbedResponse> first;
    run(out, "schema", [&]() -> std::string {
        first = probe.embed(model, texts);
        if (first->model != model) return "response model '" + first->model + "' differs from '" + model + "'";
        return {};
    });

    run(out, "dims", [&]() -> std::string {
        if (!first) return "no embed response";
        if (first->dims == 0) return "dims is zero";
        if (options.dims != 0 && first->dims != options.dims) {
            return "dims " + std::to_string(first->dims) + ", expected " + std::to_string(options.dims);
        }
        return {};
    });

    run(out, "unit_norm", [&]() -> std::string {
        if (!first) return "no embed response";
        for (std::size_t i = 0; i < first->vectors.size(); ++i) {
            double s = 0.0;
            for (double x : first->vectors[i]) s += x * x;
            if (std::abs(std::sqrt(s) - 1.0) > options.norm_tolerance) {
                return "vector " + std::to_string(i) + " has norm " + std::to_string(std::sqrt(s));
            }
        }
        return {};
    });

    run(out, "identical_inputs", [&]() -> std::string {
        if (!first) return "no embed response";
        if (max_abs_diff(first->vectors[1], first->vectors[3]) > options.determinism_tolerance) {
            return "identical texts in one batch gave different vectors";
        }
        return {};
    });

    run(out, "order_preservation", [&]() -> std::string {
        if (!first) return "no embed response";
        auto rev = probe.embed(model, {texts[2], texts[0]});
        if (max_abs_diff(rev.vectors[0], first->vectors[2]) > options.determinism_tolerance ||
            max_abs_diff(rev.vectors[1], first->vectors[0]) > options.determinism_tolerance) {
            return "vectors do not follow input order";
        }
        return {};
    });

    run(out, "determinism", [&]() -> std::string {
        if (!first) return "no embed response";
        auto again = probe.embed(model, texts);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (max_abs_diff(again.vectors[i], first->vectors[i]) > options.determinism_tolerance) {
                return "repeated request changed vector " + std::to_string(i);
            }
        }
        return {};
    });

    run(out, "rejects_malformed_json", [&]() -> std::string {
        auto res = probe.post("/embed", "{\"model\": ");
        if (!res) return "request failed: " + httplib::to_string(res.error());
        if (res->status != 400) return "expected HTTP 400, got " + std::to_string(res->status);
        return {};
    });

    run(out, "rejects_model_mismatch", [&]() -> std::string {
        auto res = probe.post("/embed", to_json(EmbedRequest{model + "-mismatch", {"a"}}).dump());
        if (!res) return "request failed: " + httplib::to_string(res.error());
        if (res->status != 400) return "expected HTTP 400, got " + std::to_string(res->status);
        return {};
    });

    return out;
}

} // namespace coderag::protocol
