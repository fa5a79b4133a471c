#include "surf/query.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "surf/errors.hpp"
#include "surf/text.hpp"

namespace surf {

namespace {

long long quantize(double v) { return std::llround(v * 1e12); }

std::string join_unique(const std::vector<std::string>& tokens, std::vector<std::string>& kept) {
    std::string text;
    kept.clear();
    for (const auto& t : tokens) {
        if (std::find(kept.begin(), kept.end(), t) != kept.end()) continue;
        kept.push_back(t);
        if (!text.empty()) text += ' ';
        text += t;
    }
    return text;
}

// Enumerates index combinations of size k from [0, n) in lexicographic order.
template <typename Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

Query make_query(std::string_view text) {
    Query q;
    std::istringstream in{std::string(text)};
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(w);
    q.text = join_unique(words, q.tokens);
    return q;
}

std::vector<Query> formulate_queries(const std::vector<TokenScore>& scores,
                                     const std::string& exception_simple_name,
                                     const QueryOptions& options) {
    if (scores.empty()) throw EmptyTokenSet();
    if (options.combo < 1 || options.k_tokens < options.combo)
        throw std::invalid_argument("query options need k_tokens >= combo >= 1");

    // callers may hand over any permutation; the canonical order decides
    std::vector<TokenScore> sorted = scores;
    std::sort(sorted.begin(), sorted.end(), token_score_before);
    const std::size_t n = std::min(options.k_tokens, sorted.size());
    const std::vector<TokenScore> top(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n));

    double exception_score = sorted.front().final;
    for (const auto& s : sorted)
        if (s.token.text == exception_simple_name) exception_score = s.final;

    auto build = [&](const std::vector<std::size_t>& chosen) {
        std::vector<std::string> words;
        double sum = 0.0;
        std::size_t count = 0;
        const bool has_exception = std::any_of(chosen.begin(), chosen.end(), [&](std::size_t i) {
            return top[i].token.text == exception_simple_name;
        });
        if (!has_exception && !exception_simple_name.empty()) {
            words.push_back(exception_simple_name);
            sum += exception_score;
            ++count;
        }
        for (auto i : chosen) {  // indices ascend, so this is descending score order
            words.push_back(top[i].token.text);
            sum += top[i].final;
            ++count;
        }
        Query q;
        q.text = join_unique(words, q.tokens);
        q.score = count ? sum / static_cast<double>(count) : 0.0;
        return q;
    };

    std::vector<Query> candidates;
    if (n < options.combo) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        candidates.push_back(build(all));
    } else {
        for_each_combination(n, options.combo, [&](const std::vector<std::size_t>& idx) {
            candidates.push_back(build(idx));
        });
    }

    std::sort(candidates.begin(), candidates.end(), [](const Query& a, const Query& b) {
        const auto qa = quantize(a.score), qb = quantize(b.score);
        if (qa != qb) return qa > qb;
        return a.text < b.text;
    });
    if (candidates.size() > options.top_q) candidates.resize(options.top_q);
    for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].rank = static_cast<int>(i + 1);
    return candidates;
}

std::vector<std::string> complete_query(std::string_view prefix, const std::vector<TokenScore>& scores) {
    std::vector<TokenScore> sorted = scores;
    std::sort(sorted.begin(), sorted.end(), token_score_before);
    std::vector<std::string> out;
    for (const auto& s : sorted) {
        if (out.size() == 10) break;
        if (text::starts_with_icase(s.token.text, prefix)) out.push_back(s.token.text);
    }
    return out;
}

}  // namespace surf
