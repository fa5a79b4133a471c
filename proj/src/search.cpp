#include "surf/search.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "surf/content.hpp"
#include "surf/errors.hpp"
#include "surf/text.hpp"

namespace surf {

namespace {

bool valid_scheme(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '+' || c == '.' || c == '-';
    });
}

bool tracking_param(std::string_view param) {
    const auto key = text::to_lower(param.substr(0, param.find('=')));
    return key.rfind("utm_", 0) == 0 || key == "gclid" || key == "fbclid";
}

std::string credential(const ProviderConfig& config) {
    if (config.credential_env.empty()) return {};
    const char* v = std::getenv(config.credential_env.c_str());
    return v ? std::string(v) : std::string();
}

std::string json_string(const nlohmann::json& j, const std::string& key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_string()) return {};
    return j[key].get<std::string>();
}

HttpResponse provider_get(HttpTransport& transport, const ProviderConfig& config, HttpRequest request) {
    request.timeout_ms = config.timeout_ms;
    HttpResponse response;
    try {
        response = transport.get(request);
    } catch (const Error& e) {
        throw ProviderError(config.id, e.what());
    }
    if (response.status < 200 || response.status >= 300)
        throw ProviderError(config.id, "HTTP " + std::to_string(response.status));
    return response;
}

nlohmann::json parse_body(const ProviderConfig& config, const std::string& body) {
    try {
        return nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(config.id, std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

int CorpusEntry::best_rank() const {
    int best = hits.empty() ? 0 : hits.front().provider_rank;
    for (const auto& h : hits) best = std::min(best, h.provider_rank);
    return best;
}

ProviderConfig ProviderConfig::from_json(const nlohmann::json& j) {
    ProviderConfig c;
    c.id = j.at("id").get<std::string>();
    c.kind = j.value("kind", c.kind);
    c.endpoint = j.value("endpoint", c.endpoint);
    c.credential_env = j.value("credential_env", c.credential_env);
    c.per_provider_limit = j.value("per_provider_limit", c.per_provider_limit);
    c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
    c.enabled = j.value("enabled", c.enabled);
    if (j.contains("options")) c.options = j["options"];
    if (c.id.empty()) throw std::invalid_argument("provider id must not be empty");
    if (c.per_provider_limit < 1) throw std::invalid_argument("per_provider_limit must be >= 1 for " + c.id);
    return c;
}

nlohmann::json ProviderConfig::to_json() const {
    return {{"id", id},
            {"kind", kind},
            {"endpoint", endpoint},
            {"credential_env", credential_env},
            {"per_provider_limit", per_provider_limit},
            {"timeout_ms", timeout_ms},
            {"enabled", enabled},
            {"options", options}};
}

std::string canonicalize_url(const std::string& url) {
    if (url.empty() || std::any_of(url.begin(), url.end(), [](unsigned char c) { return std::isspace(c); }))
        throw InvalidUrl(url);
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || !valid_scheme(url.substr(0, scheme_end))) throw InvalidUrl(url);

    std::string rest = url.substr(scheme_end + 3);
    rest = rest.substr(0, rest.find('#'));
    const auto authority_end = rest.find_first_of("/?");
    std::string authority = rest.substr(0, authority_end);
    const auto at = authority.rfind('@');
    const std::string host = authority.substr(at == std::string::npos ? 0 : at + 1);
    if (host.empty() || host.front() == ':') throw InvalidUrl(url);
    authority = authority.substr(0, at == std::string::npos ? 0 : at + 1) + text::to_lower(host);

    std::string path_and_query = authority_end == std::string::npos ? "" : rest.substr(authority_end);
    const auto qmark = path_and_query.find('?');
    std::string path = path_and_query.substr(0, qmark);
    const std::string query = qmark == std::string::npos ? "" : path_and_query.substr(qmark + 1);
    while (!path.empty() && path.back() == '/') path.pop_back();

    std::vector<std::string> params;
    std::istringstream in(query);
    for (std::string p; std::getline(in, p, '&');)
        if (!p.empty() && !tracking_param(p)) params.push_back(p);
    std::sort(params.begin(), params.end());

    std::string out = text::to_lower(url.substr(0, scheme_end)) + "://" + authority + path;
    for (std::size_t i = 0; i < params.size(); ++i) out += (i == 0 ? '?' : '&') + params[i];
    return out;
}

std::vector<ProviderHit> stackexchange_search(const Query& query, const ProviderConfig& config,
                                              HttpTransport& transport) {
    const std::string endpoint =
        config.endpoint.empty() ? "https://api.stackexchange.com/2.3/search/advanced" : config.endpoint;
    const std::string site = config.options.value("site", std::string("stackoverflow"));
    std::string url = endpoint + (endpoint.find('?') == std::string::npos ? "?" : "&");
    url += "order=desc&sort=relevance&q=" + url_encode(query.text) + "&site=" + url_encode(site) +
           "&pagesize=" + std::to_string(config.per_provider_limit);
    if (auto key = credential(config); !key.empty()) url += "&key=" + url_encode(key);

    HttpRequest request;
    request.url = url;
    const auto body = parse_body(config, provider_get(transport, config, request).body);
    if (body.contains("error_id"))
        throw ProviderError(config.id, "api error " + std::to_string(body["error_id"].get<int>()) + ": " +
                                           json_string(body, "error_message"));
    if (!body.contains("items") || !body["items"].is_array())
        throw ProviderError(config.id, "response has no items array");

    std::vector<ProviderHit> hits;
    for (const auto& item : body["items"]) {
        if (static_cast<int>(hits.size()) >= config.per_provider_limit) break;
        ProviderHit hit;
        hit.provider_id = config.id;
        hit.url = json_string(item, "link");
        if (hit.url.empty()) continue;
        hit.title = decode_entities(json_string(item, "title"));
        if (item.contains("tags") && item["tags"].is_array()) {
            for (const auto& tag : item["tags"]) {
                if (!hit.snippet.empty()) hit.snippet += ' ';
                hit.snippet += tag.get<std::string>();
            }
        }
        hit.provider_rank = static_cast<int>(hits.size()) + 1;
        hit.provider_meta = {{"score", item.value("score", 0)},
                             {"answer_count", item.value("answer_count", 0)},
                             {"is_answered", item.value("is_answered", false)}};
        hits.push_back(std::move(hit));
    }
    return hits;
}

StackExchangeProvider::StackExchangeProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport)
    : SearchProvider(std::move(config)), transport_(std::move(transport)) {}

std::vector<ProviderHit> StackExchangeProvider::search(const Query& query) {
    return stackexchange_search(query, config(), *transport_);
}

WebSearchProvider::WebSearchProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport)
    : SearchProvider(std::move(config)), transport_(std::move(transport)) {}

std::vector<ProviderHit> WebSearchProvider::search(const Query& query) {
    const auto& c = config();
    const auto& o = c.options;
    if (c.endpoint.empty()) throw ProviderError(c.id, "no endpoint configured");

    HttpRequest request;
    std::string url = c.endpoint + (c.endpoint.find('?') == std::string::npos ? "?" : "&");
    url += o.value("query_param", std::string("q")) + "=" + url_encode(query.text);
    if (auto count = o.value("count_param", std::string()); !count.empty())
        url += "&" + count + "=" + std::to_string(c.per_provider_limit);
    if (o.contains("extra_params") && o["extra_params"].is_object())
        for (const auto& [k, v] : o["extra_params"].items())
            url += "&" + url_encode(k) + "=" + url_encode(v.is_string() ? v.get<std::string>() : v.dump());
    const std::string key = credential(c);
    if (!key.empty()) {
        if (auto param = o.value("key_param", std::string()); !param.empty())
            url += "&" + param + "=" + url_encode(key);
        if (auto header = o.value("key_header", std::string()); !header.empty())
            request.headers.emplace_back(header, key);
    }
    request.url = url;

    const auto body = parse_body(c, provider_get(*transport_, c, request).body);
    const nlohmann::json::json_pointer items_ptr(o.value("items_path", std::string("/items")));
    if (!body.contains(items_ptr)) return {};  // engines omit the array when nothing matched
    const auto& items = body.at(items_ptr);
    if (!items.is_array()) throw ProviderError(c.id, "items_path does not name an array");

    const auto url_field = o.value("url_field", std::string("link"));
    const auto title_field = o.value("title_field", std::string("title"));
    const auto snippet_field = o.value("snippet_field", std::string("snippet"));
    std::vector<ProviderHit> hits;
    for (const auto& item : items) {
        if (static_cast<int>(hits.size()) >= c.per_provider_limit) break;
        ProviderHit hit;
        hit.provider_id = c.id;
        hit.url = json_string(item, url_field);
        if (hit.url.empty()) continue;
        hit.title = json_string(item, title_field);
        hit.snippet = json_string(item, snippet_field);
        hit.provider_rank = static_cast<int>(hits.size()) + 1;
        hits.push_back(std::move(hit));
    }
    return hits;
}

std::string fixture_key(const std::string& query_text) {
    return text::sha256_hex(text::to_lower(text::collapse_whitespace(query_text))).substr(0, 16);
}

FixtureProvider::FixtureProvider(ProviderConfig config, std::filesystem::path root)
    : SearchProvider(std::move(config)), root_(std::move(root)) {}

std::vector<ProviderHit> FixtureProvider::search(const Query& query) {
    ++calls_;
    const auto& c = config();
    const auto dir = root_ / c.id;
    auto path = dir / (fixture_key(query.text) + ".json");
    if (!std::filesystem::exists(path)) path = dir / "_default.json";
    std::ifstream in(path);
    if (!in) throw ProviderError(c.id, "no fixture for query '" + query.text + "' under " + dir.string());

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(c.id, std::string("invalid fixture: ") + e.what());
    }
    if (const int delay = doc.value("delay_ms", 0); delay > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(std::min(delay, c.timeout_ms)));
        if (delay > c.timeout_ms) throw ProviderError(c.id, "timeout after " + std::to_string(c.timeout_ms) + " ms");
    }
    if (const int status = doc.value("status", 200); status < 200 || status >= 300)
        throw ProviderError(c.id, "HTTP " + std::to_string(status));

    std::vector<ProviderHit> hits;
    for (const auto& item : doc.value("hits", nlohmann::json::array())) {
        if (static_cast<int>(hits.size()) >= c.per_provider_limit) break;
        ProviderHit hit;
        hit.provider_id = c.id;
        hit.url = json_string(item, "url");
        if (hit.url.empty()) continue;
        hit.title = json_string(item, "title");
        hit.snippet = json_string(item, "snippet");
        hit.provider_rank = item.value("rank", static_cast<int>(hits.size()) + 1);
        if (item.contains("meta")) hit.provider_meta = item["meta"];
        hits.push_back(std::move(hit));
    }
    return hits;
}

std::shared_ptr<SearchProvider> make_provider(const ProviderConfig& config,
                                              std::shared_ptr<HttpTransport> transport,
                                              const std::filesystem::path& fixtures_root) {
    if (config.kind == "fixture") return std::make_shared<FixtureProvider>(config, fixtures_root);
    if (config.kind == "stackexchange") return std::make_shared<StackExchangeProvider>(config, std::move(transport));
    if (config.kind == "web") return std::make_shared<WebSearchProvider>(config, std::move(transport));
    throw std::invalid_argument("unknown provider kind '" + config.kind + "' for " + config.id);
}

std::vector<CorpusEntry> merge_hits(const std::vector<std::vector<ProviderHit>>& per_provider,
                                    std::size_t corpus_cap, std::vector<std::string>* warnings) {
    std::map<std::string, CorpusEntry> by_url;
    for (const auto& hits : per_provider) {
        for (const auto& hit : hits) {
            std::string canonical;
            try {
                canonical = canonicalize_url(hit.url);
            } catch (const InvalidUrl&) {
                if (warnings) warnings->push_back(hit.provider_id + ": skipped invalid url '" + hit.url + "'");
                continue;
            }
            auto& entry = by_url[canonical];
            entry.canonical_url = canonical;
            auto same = std::find_if(entry.hits.begin(), entry.hits.end(),
                                     [&](const ProviderHit& h) { return h.provider_id == hit.provider_id; });
            if (same == entry.hits.end())
                entry.hits.push_back(hit);
            else if (hit.provider_rank < same->provider_rank)
                *same = hit;
        }
    }

    std::vector<CorpusEntry> entries;
    entries.reserve(by_url.size());
    for (auto& [url, entry] : by_url) {
        // provider order is preserved; the best-ranked titled hit names the page
        const ProviderHit* best = nullptr;
        for (const auto& h : entry.hits)
            if (!h.title.empty() && (!best || h.provider_rank < best->provider_rank)) best = &h;
        entry.best_title = best ? best->title : std::string();
        entries.push_back(std::move(entry));
    }
    std::stable_sort(entries.begin(), entries.end(), [](const CorpusEntry& a, const CorpusEntry& b) {
        if (a.best_rank() != b.best_rank()) return a.best_rank() < b.best_rank();
        return a.canonical_url < b.canonical_url;
    });
    if (entries.size() > corpus_cap) entries.resize(corpus_cap);
    return entries;
}

MetaSearcher::MetaSearcher(std::vector<std::shared_ptr<SearchProvider>> providers, SearchOptions options)
    : providers_(std::move(providers)), options_(options) {}

Corpus MetaSearcher::search_all(const Query& query) {
    std::vector<std::shared_ptr<SearchProvider>> enabled;
    for (const auto& p : providers_)
        if (p->config().enabled) enabled.push_back(p);
    if (enabled.empty()) throw AllProvidersFailed("no enabled providers");

    const std::size_t n = enabled.size();
    std::vector<std::optional<std::vector<ProviderHit>>> results(n);
    std::vector<std::string> errors(n);

    auto run_one = [&](std::size_t i) {
        const auto& provider = enabled[i];
        const std::string key = provider->id() + '\n' + query.text;
        if (options_.cache_responses) {
            std::shared_lock lock(cache_mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) {
                results[i] = it->second;
                return;
            }
        }
        try {
            auto hits = provider->search(query);
            if (options_.cache_responses) {
                std::unique_lock lock(cache_mutex_);
                cache_[key] = hits;
            }
            results[i] = std::move(hits);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };

    // one in-flight call per provider, at most max_parallel at once
    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::max<std::size_t>(1, std::min(options_.max_parallel, n));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next++) < n;) run_one(i);
            });
    }

    Corpus corpus;
    std::vector<std::vector<ProviderHit>> per_provider;
    for (std::size_t i = 0; i < n; ++i) {
        if (results[i]) {
            ++corpus.providers_active;
            per_provider.push_back(std::move(*results[i]));
        } else {
            corpus.warnings.push_back("provider " + enabled[i]->id() + " failed: " + errors[i]);
        }
    }
    corpus.entries = merge_hits(per_provider, options_.corpus_cap, &corpus.warnings);
    if (corpus.entries.empty()) {
        std::string why = "no provider returned results";
        for (const auto& w : corpus.warnings) why += "; " + w;
        throw AllProvidersFailed(why);
    }
    return corpus;
}

Corpus search_all(const Query& query, const std::vector<std::shared_ptr<SearchProvider>>& providers,
                  const SearchOptions& options) {
    MetaSearcher searcher(providers, options);
    return searcher.search_all(query);
}

}  // namespace surf
