#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "surf/http.hpp"
#include "surf/query.hpp"

namespace surf {

struct ProviderHit {
    std::string provider_id;
    std::string url;
    std::string title;
    std::string snippet;
    int provider_rank = 1;
    nlohmann::json provider_meta = nlohmann::json::object();  // e.g. score / answer_count
};

struct CorpusEntry {
    std::string canonical_url;
    std::vector<ProviderHit> hits;  // at most one per provider
    std::string best_title;

    int best_rank() const;
};

struct ProviderConfig {
    std::string id;
    std::string kind = "fixture";  // stackexchange | web | fixture
    std::string endpoint;
    std::string credential_env;  // name of the env var holding the API key
    int per_provider_limit = 30;
    int timeout_ms = 10000;
    bool enabled = true;
    nlohmann::json options = nlohmann::json::object();  // kind-specific settings

    static ProviderConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// Lowercases scheme and host, drops the fragment and tracking parameters
// (utm_*, gclid, fbclid), trims trailing slashes and sorts the remaining
// query parameters. Throws InvalidUrl.
std::string canonicalize_url(const std::string& url);

class SearchProvider {
public:
    explicit SearchProvider(ProviderConfig config) : config_(std::move(config)) {}
    virtual ~SearchProvider() = default;

    const ProviderConfig& config() const { return config_; }
    const std::string& id() const { return config_.id; }

    // Throws ProviderError.
    virtual std::vector<ProviderHit> search(const Query& query) = 0;

private:
    ProviderConfig config_;
};

// StackExchange /search/advanced. Options: "site" (default stackoverflow).
std::vector<ProviderHit> stackexchange_search(const Query& query, const ProviderConfig& config,
                                              HttpTransport& transport);

class StackExchangeProvider : public SearchProvider {
public:
    StackExchangeProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport);
    std::vector<ProviderHit> search(const Query& query) override;

private:
    std::shared_ptr<HttpTransport> transport_;
};

// Generic JSON web-search API. Options: query_param ("q"), count_param,
// key_param | key_header, items_path (JSON pointer, "/items"), url_field
// ("link"), title_field ("title"), snippet_field ("snippet"), extra_params.
class WebSearchProvider : public SearchProvider {
public:
    WebSearchProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport);
    std::vector<ProviderHit> search(const Query& query) override;

private:
    std::shared_ptr<HttpTransport> transport_;
};

// Replays `<root>/<provider id>/<fixture_key(query)>.json`, falling back to
// `_default.json`. File shape:
//   {"status": 200, "delay_ms": 0, "hits": [{"url", "title", "snippet", "meta"}]}
class FixtureProvider : public SearchProvider {
public:
    FixtureProvider(ProviderConfig config, std::filesystem::path root);
    std::vector<ProviderHit> search(const Query& query) override;

    std::size_t call_count() const { return calls_.load(); }

private:
    std::filesystem::path root_;
    std::atomic<std::size_t> calls_{0};
};

// Stable file key for a query: first 16 hex digits of SHA-256 over the
// lowercased, whitespace-collapsed query text.
std::string fixture_key(const std::string& query_text);

std::shared_ptr<SearchProvider> make_provider(const ProviderConfig& config,
                                              std::shared_ptr<HttpTransport> transport,
                                              const std::filesystem::path& fixtures_root = {});

struct SearchOptions {
    std::size_t corpus_cap = 120;
    std::size_t max_parallel = 4;
    bool cache_responses = true;
};

struct Corpus {
    std::vector<CorpusEntry> entries;
    std::vector<std::string> warnings;
    std::size_t providers_active = 0;  // enabled providers that answered
};

// Fans a query out to every enabled provider concurrently and merges the hits.
class MetaSearcher {
public:
    MetaSearcher(std::vector<std::shared_ptr<SearchProvider>> providers, SearchOptions options = {});

    // Throws AllProvidersFailed when no provider produced a hit.
    Corpus search_all(const Query& query);

    const std::vector<std::shared_ptr<SearchProvider>>& providers() const { return providers_; }

private:
    std::vector<std::shared_ptr<SearchProvider>> providers_;
    SearchOptions options_;
    std::shared_mutex cache_mutex_;
    std::map<std::string, std::vector<ProviderHit>> cache_;
};

Corpus search_all(const Query& query, const std::vector<std::shared_ptr<SearchProvider>>& providers,
                  const SearchOptions& options = {});

// Merge step alone: per-provider hit lists (in provider order) to a corpus.
std::vector<CorpusEntry> merge_hits(const std::vector<std::vector<ProviderHit>>& per_provider,
                                    std::size_t corpus_cap, std::vector<std::string>* warnings = nullptr);

}  // namespace surf
