#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "surf/graph.hpp"

namespace surf {

struct Query {
    std::vector<std::string> tokens;
    std::string text;  // tokens joined by single spaces, duplicates removed
    double score = 0.0;
    int rank = 1;

    bool operator==(const Query&) const = default;
};

// A free-typed query: whitespace-separated tokens, score 0, rank 1.
Query make_query(std::string_view text);

struct QueryOptions {
    std::size_t k_tokens = 5;
    std::size_t combo = 3;
    std::size_t top_q = 5;
};

// Combines the top `k_tokens` tokens `combo` at a time, prefixes each
// combination with the exception simple name and ranks them by mean token
// score. Throws EmptyTokenSet when `scores` is empty.
std::vector<Query> formulate_queries(const std::vector<TokenScore>& scores,
                                     const std::string& exception_simple_name,
                                     const QueryOptions& options = {});

// Up to 10 tokens whose text starts with `prefix` (case-insensitive), best first.
std::vector<std::string> complete_query(std::string_view prefix, const std::vector<TokenScore>& scores);

}  // namespace surf
