#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace surf {

inline constexpr std::size_t kMaxBodyBytes = 2 * 1024 * 1024;

struct HttpRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    int timeout_ms = 10000;
    std::size_t max_body_bytes = kMaxBodyBytes;
};

struct HttpResponse {
    int status = 0;
    std::map<std::string, std::string> headers;  // lowercased names
    std::string body;
    bool truncated = false;

    std::string header(const std::string& lowercase_name) const;
};

// One GET, no redirect following. Throws TransportError on network failure
// or timeout; HTTP error statuses are returned, not thrown.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const HttpRequest& request) = 0;
};

// libcurl-backed transport. Honors SURF_HTTP_PROXY.
class CurlTransport : public HttpTransport {
public:
    CurlTransport();
    HttpResponse get(const HttpRequest& request) override;

private:
    std::string proxy_;
};

// Replays canned responses keyed by URL and logs every request. Unknown
// URLs answer 404.
class FixtureTransport : public HttpTransport {
public:
    struct Canned {
        HttpResponse response;
        int delay_ms = 0;
    };

    void add(const std::string& url, HttpResponse response, int delay_ms = 0);
    void add_page(const std::string& url, std::string html);
    void add_redirect(const std::string& url, const std::string& location, int status = 302);

    // Loads `<dir>/index.json`: {"<url>": "file.html" | {"file"|"body"|"status"|"location"|"delay_ms"}}.
    void load_directory(const std::filesystem::path& dir);

    HttpResponse get(const HttpRequest& request) override;

    std::vector<std::string> calls() const;
    std::size_t call_count() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, Canned> responses_;
    std::vector<std::string> calls_;
};

std::string url_encode(std::string_view s);

// Resolves a Location header against the URL it came from.
std::string resolve_url(const std::string& base, const std::string& location);

}  // namespace surf
