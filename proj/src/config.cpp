#include "surf/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace surf {

namespace {

std::vector<double> parse_csv_doubles(const std::string& csv, std::size_t expected) {
    std::vector<double> values;
    std::istringstream in(csv);
    for (std::string item; std::getline(in, item, ',');) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("not a number: '" + item + "'");
        }
        if (used != item.size()) throw std::invalid_argument("not a number: '" + item + "'");
        values.push_back(v);
    }
    if (values.size() != expected)
        throw std::invalid_argument("expected " + std::to_string(expected) + " comma-separated weights");
    return values;
}

std::filesystem::path default_cache_dir() {
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return std::filesystem::path(xdg) / "surf";
    if (const char* home = std::getenv("HOME"); home && *home) return std::filesystem::path(home) / ".cache" / "surf";
    return std::filesystem::temp_directory_path() / "surf-cache";
}

}  // namespace

Config Config::defaults() {
    Config c;
    c.cache_dir = default_cache_dir();

    ProviderConfig so;
    so.id = "stackoverflow";
    so.kind = "stackexchange";
    so.endpoint = "https://api.stackexchange.com/2.3/search/advanced";
    so.credential_env = "STACKEXCHANGE_KEY";
    so.options = {{"site", "stackoverflow"}};

    ProviderConfig google;
    google.id = "google";
    google.kind = "web";
    google.endpoint = "https://www.googleapis.com/customsearch/v1";
    google.credential_env = "GOOGLE_API_KEY";
    google.enabled = false;
    google.per_provider_limit = 10;  // Custom Search caps a page at 10
    google.options = {{"key_param", "key"}, {"count_param", "num"},  {"items_path", "/items"},
                      {"url_field", "link"}, {"title_field", "title"}, {"snippet_field", "snippet"},
                      {"extra_params", {{"cx", ""}}}};

    ProviderConfig bing;
    bing.id = "bing";
    bing.kind = "web";
    bing.endpoint = "https://api.bing.microsoft.com/v7.0/search";
    bing.credential_env = "BING_API_KEY";
    bing.enabled = false;
    bing.options = {{"key_header", "Ocp-Apim-Subscription-Key"},
                    {"count_param", "count"},
                    {"items_path", "/webPages/value"},
                    {"url_field", "url"},
                    {"title_field", "name"},
                    {"snippet_field", "snippet"}};

    c.providers = {so, google, bing};
    return c;
}

Config Config::from_json(const nlohmann::json& j) {
    Config c = defaults();
    if (j.contains("providers")) {
        c.providers.clear();
        for (const auto& p : j["providers"]) c.providers.push_back(ProviderConfig::from_json(p));
    }
    c.search.corpus_cap = j.value("corpus_cap", c.search.corpus_cap);
    c.search.max_parallel = j.value("max_parallel", c.search.max_parallel);
    if (j.contains("rank")) {
        const auto& r = j["rank"];
        if (r.contains("weights")) {
            const auto w = r["weights"].get<std::vector<double>>();
            if (w.size() != 4) throw std::invalid_argument("rank.weights needs 4 values");
            std::copy(w.begin(), w.end(), c.rank_weights.w.begin());
            c.rank_weights.validate();
        }
        c.top_n = r.value("top_n", c.top_n);
    }
    if (j.contains("graph")) {
        const auto& g = j["graph"];
        c.pagerank.damping = g.value("damping", c.pagerank.damping);
        c.pagerank.eps = g.value("eps", c.pagerank.eps);
        c.pagerank.max_iter = g.value("max_iter", c.pagerank.max_iter);
        if (g.contains("weights")) {
            const auto w = g["weights"].get<std::vector<double>>();
            if (w.size() != 3) throw std::invalid_argument("graph.weights needs 3 values");
            c.token_weights = {w[0], w[1], w[2]};
        }
    }
    if (j.contains("query")) {
        const auto& q = j["query"];
        c.query.k_tokens = q.value("k_tokens", c.query.k_tokens);
        c.query.combo = q.value("combo", c.query.combo);
        c.query.top_q = q.value("top_q", c.query.top_q);
    }
    if (j.contains("cache")) {
        const auto& k = j["cache"];
        c.cache_enabled = k.value("enabled", c.cache_enabled);
        if (k.contains("dir")) c.cache_dir = k["dir"].get<std::string>();
        if (k.contains("ttl_hours")) c.cache_ttl = std::chrono::hours(k["ttl_hours"].get<int>());
    }
    if (j.contains("fetch")) {
        const auto& f = j["fetch"];
        c.fetch.timeout_ms = f.value("timeout_ms", c.fetch.timeout_ms);
        c.fetch.max_parallel = f.value("parallel", c.fetch.max_parallel);
    }
    c.listen = j.value("listen", c.listen);
    return c;
}

Config load_config(const std::optional<std::filesystem::path>& path) {
    std::optional<std::filesystem::path> chosen = path;
    if (!chosen)
        if (const char* env = std::getenv("SURF_CONFIG"); env && *env) chosen = env;
    if (!chosen) return Config::defaults();
    std::ifstream in(*chosen);
    if (!in) throw std::runtime_error("cannot read config " + chosen->string());
    return Config::from_json(nlohmann::json::parse(in));
}

RankWeights parse_rank_weights(const std::string& csv) {
    const auto v = parse_csv_doubles(csv, 4);
    RankWeights w;
    std::copy(v.begin(), v.end(), w.w.begin());
    w.validate();
    return w;
}

MetricWeights parse_token_weights(const std::string& csv) {
    const auto v = parse_csv_doubles(csv, 3);
    MetricWeights w{v[0], v[1], v[2]};
    if (w.pagerank < 0 || w.doi < 0 || w.frequency < 0 || std::abs(w.pagerank + w.doi + w.frequency - 1.0) > 1e-9)
        throw std::invalid_argument("token weights must be non-negative and sum to 1");
    return w;
}

}  // namespace surf
