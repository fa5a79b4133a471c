#include "surf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "surf/errors.hpp"
#include "surf/text.hpp"

namespace surf {

namespace {

long long quantize(double v) { return std::llround(v * 1e12); }

void check_weights(const MetricWeights& w) {
    if (w.pagerank < 0 || w.doi < 0 || w.frequency < 0)
        throw std::invalid_argument("token metric weights must be non-negative");
    if (std::abs(w.pagerank + w.doi + w.frequency - 1.0) > 1e-9)
        throw std::invalid_argument("token metric weights must sum to 1");
}

std::string dot_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

const char* node_shape(TokenKind kind) {
    switch (kind) {
        case TokenKind::ExceptionType: return "doubleoctagon";
        case TokenKind::ClassName: return "box";
        case TokenKind::MethodName: return "ellipse";
    }
    return "box";
}

}  // namespace

const char* to_string(Relation r) {
    switch (r) {
        case Relation::StaticRelation: return "static";
        case Relation::CallSequence: return "call";
        case Relation::ThrowSite: return "throw";
    }
    return "?";
}

TokenGraph::TokenGraph(std::vector<Token> nodes) : nodes_(std::move(nodes)), adjacency_(nodes_.size()) {}

std::size_t TokenGraph::index_of(std::string_view token) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].text == token) return i;
    return npos;
}

void TokenGraph::add_edge(std::size_t a, std::size_t b, Relation tag) {
    if (a == b) return;
    if (a >= nodes_.size() || b >= nodes_.size()) throw std::out_of_range("edge endpoint is not a node");
    const auto key = std::minmax(a, b);
    auto [it, inserted] = edges_.try_emplace({key.first, key.second}, 0);
    it->second |= static_cast<std::uint8_t>(tag);
    if (inserted) {
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
    }
}

bool TokenGraph::has_edge(std::string_view a, std::string_view b) const {
    const auto ia = index_of(a), ib = index_of(b);
    if (ia == npos || ib == npos) return false;
    const auto key = std::minmax(ia, ib);
    return edges_.count({key.first, key.second}) > 0;
}

bool TokenGraph::has_relation(std::string_view a, std::string_view b, Relation tag) const {
    const auto ia = index_of(a), ib = index_of(b);
    if (ia == npos || ib == npos) return false;
    const auto key = std::minmax(ia, ib);
    const auto it = edges_.find({key.first, key.second});
    return it != edges_.end() && (it->second & static_cast<std::uint8_t>(tag));
}

TokenGraph build_graph(const StackTrace& trace) {
    auto tokens = extract_tokens(trace);
    if (tokens.empty()) throw EmptyTokenSet();
    TokenGraph graph(std::move(tokens));
    auto idx = [&](const std::string& t) { return graph.index_of(t); };

    for (const auto& seg : token_layout(trace)) {
        for (std::size_t i = 0; i < seg.frames.size(); ++i) {
            const auto& f = seg.frames[i];
            std::vector<std::size_t> members;
            for (const auto& c : f.classes) members.push_back(idx(c));
            if (f.method) members.push_back(idx(*f.method));
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b)
                    graph.add_edge(members[a], members[b], Relation::StaticRelation);

            if (i + 1 < seg.frames.size()) {
                const auto& caller = seg.frames[i + 1];
                if (f.method && caller.method)
                    graph.add_edge(idx(*caller.method), idx(*f.method), Relation::CallSequence);
            }
        }
        if (seg.exception && !seg.frames.empty()) {
            // throw site: the top frame's method, or its innermost class when
            // the method was filtered
            const auto& top = seg.frames.front();
            if (top.method)
                graph.add_edge(idx(*seg.exception), idx(*top.method), Relation::ThrowSite);
            else if (!top.classes.empty())
                graph.add_edge(idx(*seg.exception), idx(top.classes.back()), Relation::ThrowSite);
        }
    }
    return graph;
}

PageRankResult pagerank(const std::vector<std::vector<std::size_t>>& adjacency,
                        const PageRankOptions& options) {
    const std::size_t n = adjacency.size();
    const double d = options.damping;
    PageRankResult result;
    result.scores.assign(n, 1.0);
    std::vector<double> next(n);
    for (int iter = 0; iter < options.max_iter; ++iter) {
        double max_change = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            double sum = 0.0;
            for (auto u : adjacency[v]) sum += result.scores[u] / static_cast<double>(adjacency[u].size());
            next[v] = (1.0 - d) + d * sum;
            max_change = std::max(max_change, std::abs(next[v] - result.scores[v]));
        }
        result.scores.swap(next);
        result.iterations = iter + 1;
        if (max_change < options.eps) {
            result.converged = true;
            break;
        }
    }
    return result;
}

PageRankResult pagerank(const TokenGraph& graph, const PageRankOptions& options) {
    return pagerank(graph.adjacency(), options);
}

std::map<std::string, double> degree_of_interest(const StackTrace& trace) {
    std::map<std::string, double> doi;
    for (const auto& t : extract_tokens(trace)) doi[t.text] = 1.0 / (1.0 + static_cast<double>(t.min_depth));
    return doi;
}

std::vector<double> min_max_normalize(const std::vector<double>& raw) {
    if (raw.empty()) return {};
    const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
    const double min = *lo, max = *hi;
    std::vector<double> out(raw.size(), 1.0);
    if (max - min <= 0.0) return out;
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = std::clamp((raw[i] - min) / (max - min), 0.0, 1.0);
    return out;
}

bool token_score_before(const TokenScore& a, const TokenScore& b) {
    const auto qa = quantize(a.final), qb = quantize(b.final);
    if (qa != qb) return qa > qb;
    if (a.token.min_depth != b.token.min_depth) return a.token.min_depth < b.token.min_depth;
    return a.token.text < b.token.text;
}

void fuse_token_scores(std::vector<TokenScore>& scores, const MetricWeights& weights) {
    check_weights(weights);
    std::vector<double> pr, doi, freq;
    for (const auto& s : scores) {
        pr.push_back(s.pagerank_raw);
        doi.push_back(s.doi_raw);
        freq.push_back(s.freq_raw);
    }
    const auto prn = min_max_normalize(pr), doin = min_max_normalize(doi), freqn = min_max_normalize(freq);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        auto& s = scores[i];
        s.pagerank_n = prn[i];
        s.doi_n = doin[i];
        s.freq_n = freqn[i];
        s.final = std::clamp(weights.pagerank * s.pagerank_n + weights.doi * s.doi_n +
                                 weights.frequency * s.freq_n,
                             0.0, 1.0);
    }
    std::sort(scores.begin(), scores.end(), token_score_before);
}

TokenScoring score_tokens(const StackTrace& trace, const ContextCode& code, const MetricWeights& weights,
                          const PageRankOptions& pr) {
    check_weights(weights);
    TokenScoring out;
    out.graph = build_graph(trace);
    out.pagerank = pagerank(out.graph, pr);
    const auto& nodes = out.graph.nodes();
    out.scores.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        TokenScore s;
        s.token = nodes[i];
        s.pagerank_raw = out.pagerank.scores[i];
        s.doi_raw = 1.0 / (1.0 + static_cast<double>(nodes[i].min_depth));
        s.freq_raw = code.count(text::to_lower(nodes[i].text));
        out.scores.push_back(std::move(s));
    }
    fuse_token_scores(out.scores, weights);
    return out;
}

std::vector<TokenScore> token_scores(const StackTrace& trace, const ContextCode& code,
                                     const MetricWeights& weights, const PageRankOptions& pr) {
    return score_tokens(trace, code, weights, pr).scores;
}

std::string export_dot(const TokenGraph& graph, const std::vector<TokenScore>& scores) {
    std::ostringstream out;
    out << "digraph token_graph {\n";
    for (std::size_t i = 0; i < graph.size(); ++i) {
        const auto& tok = graph.nodes()[i];
        const auto it = std::find_if(scores.begin(), scores.end(),
                                     [&](const TokenScore& s) { return s.token.text == tok.text; });
        if (it == scores.end()) throw std::invalid_argument("no score for token " + tok.text);
        char score[32];
        std::snprintf(score, sizeof score, "%.3f", it->final);
        out << "  n" << i << " [label=\"" << dot_escape(tok.text) << "\\n" << score << "\", shape="
            << node_shape(tok.kind) << "];\n";
    }
    for (const auto& [key, tags] : graph.edges()) {
        std::string label;
        for (auto r : {Relation::StaticRelation, Relation::CallSequence, Relation::ThrowSite}) {
            if (!(tags & static_cast<std::uint8_t>(r))) continue;
            if (!label.empty()) label += '+';
            label += to_string(r);
        }
        out << "  n" << key.first << " -> n" << key.second << " [dir=none, label=\"" << label << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace surf
