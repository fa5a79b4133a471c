#include "surf/engine.hpp"

#include <algorithm>
#include <fstream>

#include "surf/errors.hpp"
#include "surf/text.hpp"

namespace surf {

namespace {

std::optional<std::string> non_blank(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw std::invalid_argument(std::string(key) + " must be a string");
    auto v = j[key].get<std::string>();
    if (text::trim(v).empty()) return std::nullopt;
    return v;
}

std::vector<ProviderConfig> fixture_providers(const std::filesystem::path& dir) {
    std::vector<ProviderConfig> out;
    if (const auto listing = dir / "providers.json"; std::filesystem::exists(listing)) {
        std::ifstream in(listing);
        for (const auto& p : nlohmann::json::parse(in)) {
            auto pc = ProviderConfig::from_json(p);
            pc.kind = "fixture";
            out.push_back(std::move(pc));
        }
        return out;
    }
    if (!std::filesystem::is_directory(dir / "providers")) return out;
    for (const auto& e : std::filesystem::directory_iterator(dir / "providers")) {
        if (!e.is_directory()) continue;
        ProviderConfig pc;
        pc.id = e.path().filename().string();
        pc.kind = "fixture";
        out.push_back(std::move(pc));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

}  // namespace

StackTrace parse_trace_text(std::string_view text) {
    const auto spans = detect_traces(text);
    if (!spans.empty()) return parse_trace(spans.front().lines);
    return parse_trace(text);
}

SearchRequest SearchRequest::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("request body must be a JSON object");
    SearchRequest r;
    r.query = non_blank(j, "query");
    r.trace_text = non_blank(j, "trace_text");
    r.context_code = non_blank(j, "context_code");
    if (j.contains("associate_context") && !j["associate_context"].is_null()) {
        if (!j["associate_context"].is_boolean()) throw std::invalid_argument("associate_context must be a boolean");
        r.associate_context = j["associate_context"].get<bool>();
    }
    if (j.contains("weights") && !j["weights"].is_null()) {
        const auto& w = j["weights"];
        if (!w.is_array() || w.size() != 4 ||
            !std::all_of(w.begin(), w.end(), [](const nlohmann::json& x) { return x.is_number(); }))
            throw std::invalid_argument("weights must be an array of 4 numbers");
        RankWeights rw;
        for (std::size_t i = 0; i < 4; ++i) rw.w[i] = w[i].get<double>();
        rw.validate();
        r.weights = rw;
    }
    if (!r.query && !r.trace_text) throw std::invalid_argument("request needs a query or trace_text");
    return r;
}

nlohmann::json queries_json(const Recommendation& rec) {
    nlohmann::json queries = nlohmann::json::array();
    for (const auto& q : rec.queries) queries.push_back({{"text", q.text}, {"score", q.score}, {"tokens", q.tokens}});
    return {{"queries", queries}, {"graph_dot", rec.graph_dot}};
}

nlohmann::json search_json(const SearchResponse& response) {
    nlohmann::json results = nlohmann::json::array();
    for (std::size_t i = 0; i < response.results.size(); ++i) {
        const auto& r = response.results[i];
        nlohmann::json providers = nlohmann::json::array();
        for (const auto& h : r.entry.hits) providers.push_back(h.provider_id);
        results.push_back({{"url", r.entry.canonical_url},
                           {"title", i < response.titles.size() ? response.titles[i] : r.entry.best_title},
                           {"rank", r.rank},
                           {"content_relevance", r.metrics.content_relevance},
                           {"context_relevance", r.metrics.context_relevance},
                           {"engine_confidence", r.metrics.engine_confidence},
                           {"popularity", r.metrics.popularity},
                           {"final_score", r.final_score},
                           {"providers", providers}});
    }
    return {{"results", results}, {"warnings", response.warnings}};
}

Engine::Engine(Config config, std::shared_ptr<HttpTransport> transport, std::filesystem::path fixtures_root)
    : config_(std::move(config)), transport_(std::move(transport)) {
    std::vector<std::shared_ptr<SearchProvider>> providers;
    for (const auto& pc : config_.providers) providers.push_back(make_provider(pc, transport_, fixtures_root));
    searcher_ = std::make_unique<MetaSearcher>(std::move(providers), config_.search);
    std::shared_ptr<PageCache> cache;
    if (config_.cache_enabled && !config_.cache_dir.empty())
        cache = std::make_shared<PageCache>(config_.cache_dir, config_.cache_ttl);
    fetcher_ = std::make_unique<PageFetcher>(transport_, std::move(cache), config_.fetch);
}

std::shared_ptr<Engine> Engine::for_fixtures(const std::filesystem::path& dir, Config base) {
    base.cache_enabled = false;
    base.providers = fixture_providers(dir);
    auto transport = std::make_shared<FixtureTransport>();
    transport->load_directory(dir / "pages");
    return std::make_shared<Engine>(std::move(base), std::move(transport), dir / "providers");
}

std::shared_ptr<Engine> Engine::live(Config config) {
    return std::make_shared<Engine>(std::move(config), std::make_shared<CurlTransport>());
}

Recommendation Engine::recommend(std::string_view trace_text, std::string_view code_text) const {
    Recommendation rec;
    rec.trace = parse_trace_text(trace_text);
    rec.code = tokenize_code(code_text);
    rec.scoring = score_tokens(rec.trace, rec.code, config_.token_weights, config_.pagerank);
    rec.queries = formulate_queries(rec.scoring.scores, rec.trace.simple_name(), config_.query);
    rec.graph_dot = export_dot(rec.scoring.graph, rec.scoring.scores);
    return rec;
}

SearchResponse Engine::search(const SearchRequest& request) {
    if (!request.query && !request.trace_text) throw std::invalid_argument("request needs a query or trace_text");
    if (request.weights) request.weights->validate();

    std::optional<StackTrace> trace;
    std::optional<ContextCode> code;
    if (request.trace_text) trace = parse_trace_text(*request.trace_text);
    if (request.context_code) code = tokenize_code(*request.context_code);

    SearchResponse response;
    if (request.query) {
        response.query = make_query(*request.query);
    } else {
        const auto rec = recommend(*request.trace_text, request.context_code.value_or(""));
        response.query = rec.queries.front();
    }

    const auto ctx = make_context(response.query, std::move(trace), std::move(code), request.associate_context);
    const Corpus corpus = searcher_->search_all(response.query);
    response.corpus_size = corpus.entries.size();
    response.warnings = corpus.warnings;

    std::vector<std::string> urls;
    for (const auto& e : corpus.entries) urls.push_back(e.canonical_url);
    std::vector<std::string> failures;
    const auto pages = fetcher_->fetch_all(urls, &failures);
    if (!failures.empty())
        response.warnings.push_back(std::to_string(failures.size()) + " of " + std::to_string(urls.size()) +
                                    " pages unavailable; scored from provider snippets");

    RankOptions options;
    options.weights = request.weights.value_or(config_.rank_weights);
    options.top_n = config_.top_n;
    options.providers_active = corpus.providers_active;
    response.results = rank(corpus.entries, pages, ctx, options);
    for (const auto& r : response.results) {
        const auto it = pages.find(r.entry.canonical_url);
        response.titles.push_back(it != pages.end() && !it->second.title.empty() ? it->second.title
                                                                                 : r.entry.best_title);
    }
    return response;
}

}  // namespace surf
