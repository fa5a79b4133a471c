#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "surf/http.hpp"

namespace surf {

struct PageContent {
    std::string canonical_url;
    std::string title;
    std::string body_text;                 // visible text, whitespace collapsed
    std::vector<std::string> code_blocks;  // <code>/<pre>/<blockquote>, outermost only
    std::chrono::system_clock::time_point fetched_at{};
    bool from_cache = false;
};

// Same page content, ignoring fetch bookkeeping (fetched_at, from_cache).
bool same_content(const PageContent& a, const PageContent& b);

// Best-effort extraction over arbitrary bytes; never throws on bad markup.
PageContent extract_content(std::string_view html, const std::string& url);

// Decodes named (common subset) and numeric character references.
std::string decode_entities(std::string_view s);

nlohmann::json to_json(const PageContent& page);
PageContent page_from_json(const nlohmann::json& j);

// Content-addressed page store: <dir>/<2-char prefix>/<sha256(url)>.json.
class PageCache {
public:
    using Clock = std::function<std::chrono::system_clock::time_point()>;

    explicit PageCache(std::filesystem::path dir,
                       std::chrono::seconds ttl = std::chrono::hours(24 * 7),
                       Clock clock = [] { return std::chrono::system_clock::now(); });

    // Fresh entry or nullopt; expired and unreadable entries count as misses.
    std::optional<PageContent> load(const std::string& canonical_url) const;
    // Atomic: written to a temp file, then renamed into place.
    void store(const PageContent& page) const;

    std::filesystem::path path_for(const std::string& canonical_url) const;
    std::chrono::system_clock::time_point now() const { return clock_(); }

private:
    std::filesystem::path dir_;
    std::chrono::seconds ttl_;
    Clock clock_;
};

struct FetchOptions {
    int timeout_ms = 10000;
    int max_redirects = 5;
    std::size_t max_body_bytes = kMaxBodyBytes;
    std::size_t max_parallel = 8;
};

// Throws FetchError on network failure, timeout, non-2xx status or a
// redirect loop. Oversized bodies are truncated, not rejected.
PageContent fetch_page(const std::string& url, PageCache* cache, HttpTransport& transport,
                       const FetchOptions& options = {});

class PageFetcher {
public:
    PageFetcher(std::shared_ptr<HttpTransport> transport, std::shared_ptr<PageCache> cache,
                FetchOptions options = {});

    PageContent fetch(const std::string& url);

    // Fetches concurrently; failures are reported through `failures` and
    // left out of the result.
    std::map<std::string, PageContent> fetch_all(const std::vector<std::string>& urls,
                                                 std::vector<std::string>* failures = nullptr);

private:
    std::shared_ptr<HttpTransport> transport_;
    std::shared_ptr<PageCache> cache_;
    FetchOptions options_;
};

}  // namespace surf
