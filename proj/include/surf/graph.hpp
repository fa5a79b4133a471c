#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "surf/trace.hpp"

namespace surf {

enum class Relation : std::uint8_t {
    StaticRelation = 1,  // class part <-> class part / method within one frame
    CallSequence = 2,    // caller method <-> callee method
    ThrowSite = 4,       // exception <-> method of frame 0
};

const char* to_string(Relation r);

// Undirected token graph. Nodes keep extraction order; edges are keyed by the
// (lower, higher) node index pair and carry the union of their relation tags.
class TokenGraph {
public:
    TokenGraph() = default;
    explicit TokenGraph(std::vector<Token> nodes);

    const std::vector<Token>& nodes() const { return nodes_; }
    const std::map<std::pair<std::size_t, std::size_t>, std::uint8_t>& edges() const { return edges_; }
    const std::vector<std::vector<std::size_t>>& adjacency() const { return adjacency_; }

    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }
    std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }

    // Returns npos when absent.
    std::size_t index_of(std::string_view token) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // Self-loops are ignored; repeated pairs merge tags.
    void add_edge(std::size_t a, std::size_t b, Relation tag);
    bool has_edge(std::string_view a, std::string_view b) const;
    bool has_relation(std::string_view a, std::string_view b, Relation tag) const;

private:
    std::vector<Token> nodes_;
    std::map<std::pair<std::size_t, std::size_t>, std::uint8_t> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;
};

// Throws EmptyTokenSet when every token was filtered out.
TokenGraph build_graph(const StackTrace& trace);

struct PageRankOptions {
    double damping = 0.85;
    double eps = 1e-6;
    int max_iter = 100;
};

struct PageRankResult {
    std::vector<double> scores;  // aligned with TokenGraph::nodes()
    int iterations = 0;
    bool converged = false;
};

// Undirected PageRank: S(v) = (1-d) + d * sum_{u in adj(v)} S(u)/deg(u),
// synchronous updates from S = 1 until the largest change drops below eps.
PageRankResult pagerank(const TokenGraph& graph, const PageRankOptions& options = {});

// Same recurrence over a bare adjacency list, for graphs not built from traces.
PageRankResult pagerank(const std::vector<std::vector<std::size_t>>& adjacency,
                        const PageRankOptions& options = {});

// 1 / (1 + min_depth) for each extracted token, in extraction order.
std::map<std::string, double> degree_of_interest(const StackTrace& trace);

struct MetricWeights {
    double pagerank = 1.0 / 3.0;
    double doi = 1.0 / 3.0;
    double frequency = 1.0 / 3.0;
};

struct TokenScore {
    Token token;
    double pagerank_raw = 0, doi_raw = 0, freq_raw = 0;
    double pagerank_n = 0, doi_n = 0, freq_n = 0;
    double final = 0;
};

// Min-max normalisation; a constant column maps to all ones.
std::vector<double> min_max_normalize(const std::vector<double>& raw);

// Canonical token order: final desc, then min_depth asc, then text.
bool token_score_before(const TokenScore& a, const TokenScore& b);

// Normalises the raw columns already stored in `scores`, fuses them and sorts.
void fuse_token_scores(std::vector<TokenScore>& scores, const MetricWeights& weights);

struct TokenScoring {
    TokenGraph graph;
    PageRankResult pagerank;
    std::vector<TokenScore> scores;  // sorted
};

TokenScoring score_tokens(const StackTrace& trace, const ContextCode& code,
                          const MetricWeights& weights = {}, const PageRankOptions& pr = {});

std::vector<TokenScore> token_scores(const StackTrace& trace, const ContextCode& code,
                                     const MetricWeights& weights = {},
                                     const PageRankOptions& pr = {});

std::string export_dot(const TokenGraph& graph, const std::vector<TokenScore>& scores);

}  // namespace surf
