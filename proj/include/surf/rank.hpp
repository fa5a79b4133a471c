#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "surf/content.hpp"
#include "surf/query.hpp"
#include "surf/search.hpp"
#include "surf/trace.hpp"

namespace surf {

struct SearchContext {
    Query query;
    std::optional<StackTrace> trace;
    std::optional<ContextCode> code;
    bool associate_context = true;

    bool has_context() const { return trace.has_value() || code.has_value(); }
    // Context metrics only apply when association is on and something to associate exists.
    bool context_active() const { return associate_context && has_context(); }
    // Throws std::invalid_argument when associate_context is set without trace or code.
    void validate() const;
};

// Builds a context, turning association off when there is nothing to associate.
SearchContext make_context(Query query, std::optional<StackTrace> trace, std::optional<ContextCode> code,
                           bool associate_context);

// Content, context, engine confidence, popularity.
struct RankWeights {
    std::array<double, 4> w{0.25, 0.25, 0.25, 0.25};

    double content() const { return w[0]; }
    double context() const { return w[1]; }
    double engine() const { return w[2]; }
    double popularity() const { return w[3]; }

    // Throws std::invalid_argument unless non-negative and summing to 1.
    void validate() const;
    // The context weight spread pro-rata over the other three metrics.
    RankWeights without_context() const;
};

struct MetricValues {
    double content_relevance = 0;
    double context_relevance = 0;
    double engine_confidence = 0;
    double popularity = 0;

    double get(std::size_t i) const;
};

struct RankedResult {
    CorpusEntry entry;
    MetricValues metrics;
    double final_score = 0;
    int rank = 0;
};

double content_relevance(const PageContent& page, const SearchContext& ctx);
double context_relevance(const PageContent& page, const SearchContext& ctx);
double engine_confidence(const CorpusEntry& entry, std::size_t providers_active, int k = 30);
double popularity(const CorpusEntry& entry, const std::vector<CorpusEntry>& corpus);

// Highest non-negative vote count carried by the entry's hits; nullopt for pages
// with no Q&A vote metadata.
std::optional<double> vote_score(const CorpusEntry& entry);

double fuse(const MetricValues& m, const RankWeights& weights);

// Orders rows by final score desc, then engine confidence desc, then URL.
// `rows` pairs each entry with its metrics; output keeps at most top_n.
std::vector<RankedResult> order_results(std::vector<RankedResult> rows, const RankWeights& weights,
                                        std::size_t top_n);

struct RankOptions {
    RankWeights weights;
    std::size_t top_n = 30;
    int engine_k = 30;
    std::size_t providers_active = 0;  // 0: count distinct providers in the corpus
};

// Pages missing from `pages` are scored from their provider titles and snippets.
// Throws EmptyCorpus.
std::vector<RankedResult> rank(const std::vector<CorpusEntry>& corpus,
                               const std::map<std::string, PageContent>& pages, const SearchContext& ctx,
                               const RankOptions& options = {});

// Stand-in page content built from provider metadata.
PageContent snippet_page(const CorpusEntry& entry);

}  // namespace surf
