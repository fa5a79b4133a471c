#include "surf/rank.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "surf/errors.hpp"
#include "surf/text.hpp"

namespace surf {

namespace {

long long quantize(double v) { return std::llround(v * 1e12); }

}  // namespace

void SearchContext::validate() const {
    if (associate_context && !has_context())
        throw std::invalid_argument("associate_context requires a stack trace or context code");
}

SearchContext make_context(Query query, std::optional<StackTrace> trace, std::optional<ContextCode> code,
                           bool associate_context) {
    SearchContext ctx;
    ctx.query = std::move(query);
    ctx.trace = std::move(trace);
    ctx.code = std::move(code);
    ctx.associate_context = associate_context && ctx.has_context();
    return ctx;
}

void RankWeights::validate() const {
    double sum = 0;
    for (double x : w) {
        if (!(x >= 0.0)) throw std::invalid_argument("rank weights must be non-negative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("rank weights must sum to 1");
}

RankWeights RankWeights::without_context() const {
    RankWeights out;
    const double rest = 1.0 - w[1];
    for (std::size_t i : {0u, 2u, 3u}) out.w[i] = rest > 0 ? w[i] / rest : 1.0 / 3.0;
    out.w[1] = 0.0;
    return out;
}

double MetricValues::get(std::size_t i) const {
    switch (i) {
        case 0: return content_relevance;
        case 1: return context_relevance;
        case 2: return engine_confidence;
        case 3: return popularity;
    }
    throw std::out_of_range("metric index");
}

double content_relevance(const PageContent& page, const SearchContext& ctx) {
    text::TermCounts page_terms = text::count_terms(text::terms(page.title), 2.0);
    text::add_terms(page_terms, text::terms(page.body_text));

    text::TermCounts query_terms = text::count_terms(text::terms(ctx.query.text));
    if (ctx.trace) {
        text::add_terms(query_terms, text::terms(ctx.trace->simple_name()));
        if (ctx.trace->message) text::add_terms(query_terms, text::terms(*ctx.trace->message));
    }
    return text::cosine(page_terms, query_terms);
}

double context_relevance(const PageContent& page, const SearchContext& ctx) {
    if (!ctx.context_active() || page.code_blocks.empty()) return 0.0;

    text::TermCounts page_terms;
    for (const auto& block : page.code_blocks) text::add_terms(page_terms, text::terms(block));

    text::TermCounts context_terms;
    if (ctx.trace)
        for (const auto& token : extract_tokens(*ctx.trace)) text::add_terms(context_terms, text::terms(token.text));
    if (ctx.code)
        for (const auto& [term, count] : ctx.code->identifier_bag) context_terms[term] += count;
    return text::cosine(page_terms, context_terms);
}

double engine_confidence(const CorpusEntry& entry, std::size_t providers_active, int k) {
    if (providers_active == 0 || k <= 0) return 0.0;
    double sum = 0.0;
    for (const auto& hit : entry.hits) sum += std::max(0, k - hit.provider_rank + 1) / static_cast<double>(k);
    return std::clamp(sum / static_cast<double>(providers_active), 0.0, 1.0);
}

std::optional<double> vote_score(const CorpusEntry& entry) {
    std::optional<double> best;
    for (const auto& hit : entry.hits) {
        const auto& meta = hit.provider_meta;
        if (!meta.is_object() || !meta.contains("score") || !meta["score"].is_number()) continue;
        const double votes = std::max(0.0, meta["score"].get<double>());
        best = best ? std::max(*best, votes) : votes;
    }
    return best;
}

double popularity(const CorpusEntry& entry, const std::vector<CorpusEntry>& corpus) {
    const auto votes = vote_score(entry);
    if (!votes) return 0.5;
    double max_votes = 0.0;
    for (const auto& e : corpus)
        if (auto v = vote_score(e)) max_votes = std::max(max_votes, *v);
    if (max_votes <= 0.0) return 0.0;
    return std::clamp(*votes / max_votes, 0.0, 1.0);
}

double fuse(const MetricValues& m, const RankWeights& weights) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) sum += weights.w[i] * m.get(i);
    return std::clamp(sum, 0.0, 1.0);
}

std::vector<RankedResult> order_results(std::vector<RankedResult> rows, const RankWeights& weights,
                                        std::size_t top_n) {
    for (auto& r : rows) r.final_score = fuse(r.metrics, weights);
    std::sort(rows.begin(), rows.end(), [](const RankedResult& a, const RankedResult& b) {
        const auto fa = quantize(a.final_score), fb = quantize(b.final_score);
        if (fa != fb) return fa > fb;
        const auto ea = quantize(a.metrics.engine_confidence), eb = quantize(b.metrics.engine_confidence);
        if (ea != eb) return ea > eb;
        return a.entry.canonical_url < b.entry.canonical_url;
    });
    if (rows.size() > top_n) rows.resize(top_n);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i + 1);
    return rows;
}

PageContent snippet_page(const CorpusEntry& entry) {
    PageContent page;
    page.canonical_url = entry.canonical_url;
    page.title = entry.best_title;
    for (const auto& hit : entry.hits) {
        if (hit.snippet.empty()) continue;
        if (!page.body_text.empty()) page.body_text += ' ';
        page.body_text += hit.snippet;
    }
    return page;
}

std::vector<RankedResult> rank(const std::vector<CorpusEntry>& corpus,
                               const std::map<std::string, PageContent>& pages, const SearchContext& ctx,
                               const RankOptions& options) {
    if (corpus.empty()) throw EmptyCorpus();
    options.weights.validate();
    const RankWeights weights = ctx.context_active() ? options.weights : options.weights.without_context();

    std::size_t providers_active = options.providers_active;
    if (providers_active == 0) {
        std::set<std::string> ids;
        for (const auto& e : corpus)
            for (const auto& h : e.hits) ids.insert(h.provider_id);
        providers_active = std::max<std::size_t>(1, ids.size());
    }

    std::vector<RankedResult> rows;
    rows.reserve(corpus.size());
    for (const auto& entry : corpus) {
        const auto it = pages.find(entry.canonical_url);
        const PageContent page = it != pages.end() ? it->second : snippet_page(entry);
        RankedResult r;
        r.entry = entry;
        r.metrics.content_relevance = content_relevance(page, ctx);
        r.metrics.context_relevance = context_relevance(page, ctx);
        r.metrics.engine_confidence = engine_confidence(entry, providers_active, options.engine_k);
        r.metrics.popularity = popularity(entry, corpus);
        rows.push_back(std::move(r));
    }
    return order_results(std::move(rows), weights, options.top_n);
}

}  // namespace surf
