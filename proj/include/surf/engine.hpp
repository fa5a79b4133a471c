#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "surf/config.hpp"
#include "surf/content.hpp"
#include "surf/graph.hpp"
#include "surf/query.hpp"
#include "surf/rank.hpp"
#include "surf/search.hpp"
#include "surf/trace.hpp"

namespace surf {

// First detected trace in `text`, or the whole text parsed as one trace.
// Throws MalformedTrace.
StackTrace parse_trace_text(std::string_view text);

struct Recommendation {
    StackTrace trace;
    ContextCode code;
    TokenScoring scoring;
    std::vector<Query> queries;
    std::string graph_dot;
};

struct SearchRequest {
    std::optional<std::string> query;
    std::optional<std::string> trace_text;
    std::optional<std::string> context_code;
    bool associate_context = true;
    std::optional<RankWeights> weights;

    // Throws std::invalid_argument on a malformed body.
    static SearchRequest from_json(const nlohmann::json& j);
};

struct SearchResponse {
    Query query;
    std::vector<RankedResult> results;
    std::vector<std::string> titles;  // display title per result
    std::vector<std::string> warnings;
    std::size_t corpus_size = 0;
};

// Wire shapes of the HTTP API.
nlohmann::json queries_json(const Recommendation& rec);
nlohmann::json search_json(const SearchResponse& response);

// The whole pipeline: trace analysis, query recommendation, meta search,
// page fetching and ranking. Safe for concurrent use.
class Engine {
public:
    Engine(Config config, std::shared_ptr<HttpTransport> transport,
           std::filesystem::path fixtures_root = {});

    // Offline engine over a fixture directory: providers/<id>/ (or
    // providers.json) for search hits and pages/index.json for page bodies.
    static std::shared_ptr<Engine> for_fixtures(const std::filesystem::path& dir, Config base);
    static std::shared_ptr<Engine> live(Config config);

    // Throws MalformedTrace / EmptyTokenSet.
    Recommendation recommend(std::string_view trace_text, std::string_view code_text) const;

    // Throws std::invalid_argument, MalformedTrace, EmptyTokenSet, AllProvidersFailed.
    SearchResponse search(const SearchRequest& request);

    const Config& config() const { return config_; }
    MetaSearcher& searcher() { return *searcher_; }

private:
    Config config_;
    std::shared_ptr<HttpTransport> transport_;
    std::unique_ptr<MetaSearcher> searcher_;
    std::unique_ptr<PageFetcher> fetcher_;
};

}  // namespace surf
