#pragma once

#include "coderag/providers.hpp"
#include "coderag/protocol.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fixture {

/// In-process HTTP server speaking the embedding and completion protocol,
/// with knobs for misbehaving.
class FakeServer {
public:
    struct Options {
        std::string model = "fake-embed";
        std::size_t dims = 16;
        bool normalize = true;
        bool reverse_order = false;     // answer vectors in reverse input order
        bool accept_any_model = false;  // never answer 400 on a model mismatch
        bool accept_bad_json = false;
        std::size_t report_dims = 0;    // nonzero: lie about dims
        int fail_first = 0;             // answer 503 to this many POSTs first
        int client_error_status = 0;    // nonzero: answer every POST with this status
        std::string completion_text = "return 0;";
        int completion_delay_ms = 0;
    };

    FakeServer() : FakeServer(Options{}) {}
    explicit FakeServer(Options o) : opt_(std::move(o)) {
        server_.Get("/health", [this](const httplib::Request& req, httplib::Response& res) {
            note(req);
            res.set_content(coderag::protocol::to_json(coderag::protocol::Health{"ok", opt_.model}).dump(),
                            "application/json");
        });
        server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) { embed(req, res); });
        server_.Post("/complete", [this](const httplib::Request& req, httplib::Response& res) { complete(req, res); });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~FakeServer() {
        server_.stop();
        thread_.join();
    }

    FakeServer(const FakeServer&) = delete;
    FakeServer& operator=(const FakeServer&) = delete;

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int posts() const { return posts_; }
    int max_concurrent() const { return max_concurrent_; }
    std::vector<std::size_t> batch_sizes() const {
        std::lock_guard lock(mu_);
        return batch_sizes_;
    }
    std::string last_authorization() const {
        std::lock_guard lock(mu_);
        return last_auth_;
    }

private:
    void note(const httplib::Request& req) {
        std::lock_guard lock(mu_);
        last_auth_ = req.get_header_value("Authorization");
    }

    bool maybe_fail(httplib::Response& res) {
        const int n = ++posts_;
        if (opt_.client_error_status) {
            res.status = opt_.client_error_status;
            res.set_content("{\"error\":\"refused by fake\"}", "application/json");
            return true;
        }
        if (n <= opt_.fail_first) {
            res.status = 503;
            res.set_content("{\"error\":\"warming up\"}", "application/json");
            return true;
        }
        return false;
    }

    void embed(const httplib::Request& req, httplib::Response& res) {
        note(req);
        if (maybe_fail(res)) return;
        coderag::protocol::EmbedRequest parsed;
        try {
            parsed = coderag::protocol::parse_embed_request(coderag::protocol::parse_body(req.body));
        } catch (const std::exception& e) {
            if (!opt_.accept_bad_json) {
                res.status = 400;
                res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
                return;
            }
        }
        if (parsed.model != opt_.model && !opt_.accept_any_model) {
            res.status = 400;
            res.set_content("{\"error\":\"model mismatch\"}", "application/json");
            return;
        }
        {
            std::lock_guard lock(mu_);
            batch_sizes_.push_back(parsed.texts.size());
        }
        coderag::protocol::EmbedResponse out;
        out.model = opt_.model;
        out.dims = opt_.report_dims ? opt_.report_dims : opt_.dims;
        for (const auto& t : parsed.texts) {
            auto v = coderag::mock_embed(t.empty() ? "empty" : t, opt_.dims, 0).values;
            if (!opt_.normalize) {
                for (auto& x : v) x *= 3.0;
            }
            out.vectors.push_back(std::move(v));
        }
        if (opt_.reverse_order) std::reverse(out.vectors.begin(), out.vectors.end());
        res.set_content(coderag::protocol::to_json(out).dump(), "application/json");
    }

    void complete(const httplib::Request& req, httplib::Response& res) {
        note(req);
        const int now = ++in_flight_;
        int seen = max_concurrent_.load();
        while (now > seen && !max_concurrent_.compare_exchange_weak(seen, now)) {
        }
        struct Leave {
            std::atomic<int>& n;
            ~Leave() { --n; }
        } leave{in_flight_};
        if (maybe_fail(res)) return;
        coderag::protocol::CompleteRequest parsed;
        try {
            parsed = coderag::protocol::parse_complete_request(coderag::protocol::parse_body(req.body));
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
            return;
        }
        if (opt_.completion_delay_ms) std::this_thread::sleep_for(std::chrono::milliseconds(opt_.completion_delay_ms));
        coderag::protocol::CompleteResponse out;
        out.text = opt_.completion_text;
        out.prompt_tokens = coderag::default_tokenizer().count(parsed.prompt);
        out.completion_tokens = coderag::default_tokenizer().count(out.text);
        res.set_content(coderag::protocol::to_json(out).dump(), "application/json");
    }

    Options opt_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> posts_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_concurrent_{0};
    mutable std::mutex mu_;
    std::vector<std::size_t> batch_sizes_;
    std::string last_auth_;
};

} // namespace fixture
