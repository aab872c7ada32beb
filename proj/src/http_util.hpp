#pragma once

#include "coderag/error.hpp"

#include <httplib.h>

#include <memory>
#include <string>

namespace coderag::detail {

struct Endpoint {
    std::string origin; // scheme://host[:port]
    std::string prefix; // path prefix without trailing '/'
};

inline Endpoint parse_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw DataError("endpoint '" + url + "' must start with http://");
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http") throw DataError("endpoint '" + url + "': only http:// is supported");
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.origin = url.substr(0, path_start);
    if (path_start != std::string::npos) {
        e.prefix = url.substr(path_start);
        while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
    }
    if (e.origin.size() <= scheme_end + 3) throw DataError("endpoint '" + url + "' has no host");
    return e;
}

inline std::unique_ptr<httplib::Client> make_client(const Endpoint& e, int timeout_ms) {
    auto client = std::make_unique<httplib::Client>(e.origin);
    const auto sec = timeout_ms / 1000, usec = (timeout_ms % 1000) * 1000;
    client->set_connection_timeout(sec, usec);
    client->set_read_timeout(sec, usec);
    client->set_write_timeout(sec, usec);
    return client;
}

} // namespace coderag::detail
