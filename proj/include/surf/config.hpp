#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "surf/content.hpp"
#include "surf/graph.hpp"
#include "surf/query.hpp"
#include "surf/rank.hpp"
#include "surf/search.hpp"

namespace surf {

// Runtime settings. JSON file shape (every key optional):
//   {"providers": [ProviderConfig...], "corpus_cap": 120, "max_parallel": 4,
//    "rank": {"weights": [content, context, engine, popularity], "top_n": 30},
//    "graph": {"damping": 0.85, "weights": [pr, doi, freq]},
//    "query": {"k_tokens": 5, "combo": 3, "top_q": 5},
//    "cache": {"dir": "...", "ttl_hours": 168, "enabled": true},
//    "fetch": {"timeout_ms": 10000, "parallel": 8}, "listen": "127.0.0.1:7878"}
struct Config {
    std::vector<ProviderConfig> providers;
    SearchOptions search;
    RankWeights rank_weights;
    std::size_t top_n = 30;
    MetricWeights token_weights;
    PageRankOptions pagerank;
    QueryOptions query;
    bool cache_enabled = true;
    std::filesystem::path cache_dir;
    std::chrono::seconds cache_ttl = std::chrono::hours(24 * 7);
    FetchOptions fetch;
    std::string listen = "127.0.0.1:7878";

    // StackExchange enabled; Bing / Google JSON adapters present but disabled.
    static Config defaults();
    static Config from_json(const nlohmann::json& j);
};

// Explicit path, else $SURF_CONFIG, else defaults.
Config load_config(const std::optional<std::filesystem::path>& path);

// "0.4,0.2,0.2,0.2" -> weights; throws std::invalid_argument.
RankWeights parse_rank_weights(const std::string& csv);
MetricWeights parse_token_weights(const std::string& csv);

}  // namespace surf
