#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "surf/errors.hpp"
#include "surf/graph.hpp"
#include "surf/query.hpp"

using namespace surf;

namespace {

std::vector<TokenScore> scored(const std::vector<std::pair<std::string, double>>& rows) {
    std::vector<TokenScore> out;
    for (const auto& [text, score] : rows) {
        TokenScore s;
        s.token = {text, text.find("Exception") != std::string::npos ? TokenKind::ExceptionType : TokenKind::ClassName, 0};
        s.final = score;
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST_CASE("five tokens give ten candidates and the top five are returned") {
    const auto scores = scored({{"Alpha", 0.9}, {"Bravo", 0.8}, {"Charlie", 0.7}, {"Delta", 0.6}, {"Echo", 0.5}});
    QueryOptions all;
    all.top_q = 100;
    const auto every = formulate_queries(scores, "FooException", all);
    CHECK(every.size() == 10);
    const auto q = formulate_queries(scores, "FooException");
    REQUIRE(q.size() == 5);
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(q[i].tokens.front() == "FooException");
        CHECK(q[i].tokens.size() == 4);
        CHECK(q[i].rank == static_cast<int>(i + 1));
        if (i) CHECK(q[i - 1].score >= q[i].score);
    }
    CHECK(q[0].text == "FooException Alpha Bravo Charlie");
    // an absent exception token contributes the best score
    CHECK(q[0].score == doctest::Approx((0.9 + 0.9 + 0.8 + 0.7) / 4));
}

TEST_CASE("the exception name is not repeated when it is already a top token") {
    const auto scores =
        scored({{"FooException", 0.9}, {"Bravo", 0.8}, {"Charlie", 0.7}, {"Delta", 0.6}, {"Echo", 0.5}});
    const auto q = formulate_queries(scores, "FooException");
    CHECK(q[0].text == "FooException Bravo Charlie");
    CHECK(q[0].tokens.size() == 3);
    for (const auto& query : q)
        CHECK(std::count(query.tokens.begin(), query.tokens.end(), "FooException") == 1);
}

TEST_CASE("fewer tokens than a combination") {
    const auto q = formulate_queries(scored({{"Alpha", 0.9}, {"Bravo", 0.1}}), "BarError");
    REQUIRE(q.size() == 1);
    CHECK(q[0].text == "BarError Alpha Bravo");
    CHECK_THROWS_AS(formulate_queries({}, "BarError"), EmptyTokenSet);
}

TEST_CASE("ties break on query text and input order does not matter") {
    auto scores = scored({{"Delta", 0.5}, {"Alpha", 0.5}, {"Charlie", 0.5}, {"Bravo", 0.5}, {"Echo", 0.5}});
    const auto q1 = formulate_queries(scores, "E");
    std::mt19937 rng(5);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(scores.begin(), scores.end(), rng);
        CHECK(formulate_queries(scores, "E") == q1);
    }
    for (std::size_t i = 1; i < q1.size(); ++i) CHECK(q1[i - 1].text < q1[i].text);
}

TEST_CASE("sample code + trace queries") {
    const auto scores = token_scores(parse_trace(fx::sample_trace()), tokenize_code(fx::sample_code()));
    const auto q = formulate_queries(scores, "ConcurrentModificationException");
    REQUIRE(q.size() == 5);
    for (const auto& query : q) CHECK(query.text.find("ConcurrentModificationException") != std::string::npos);
    CHECK(q[0].text == "ConcurrentModificationException next ArrayList checkForComodification");
}

TEST_CASE("completion") {
    const auto scores = token_scores(parse_trace(fx::sample_trace()), {});
    CHECK(complete_query("concurrent", scores) == std::vector<std::string>{"ConcurrentModificationException"});
    CHECK(complete_query("m", scores).size() == 2);
    CHECK(complete_query("zzz", scores).empty());
    CHECK(complete_query("", scores).size() == scores.size());
    std::vector<std::pair<std::string, double>> many;
    for (int i = 0; i < 15; ++i) many.push_back({"tok" + std::to_string(100 + i), 1.0 - i * 0.01});
    CHECK(complete_query("tok", scored(many)).size() == 10);
}

TEST_CASE("make_query") {
    const auto q = make_query("  foo   bar foo ");
    CHECK(q.text == "foo bar");
    CHECK(q.tokens == std::vector<std::string>{"foo", "bar"});
}
