#include <doctest.h>

#include <set>

#include "support.hpp"
#include "surf/errors.hpp"
#include "surf/http.hpp"
#include "surf/search.hpp"

using namespace surf;

namespace {

HttpResponse ok_json(const std::string& body) {
    HttpResponse r;
    r.status = 200;
    r.body = body;
    return r;
}

// Answers any URL with one canned response and records the calls.
struct StubTransport : HttpTransport {
    HttpResponse response;
    std::vector<std::string> urls;
    HttpResponse get(const HttpRequest& request) override {
        urls.push_back(request.url);
        return response;
    }
};

struct ListProvider : SearchProvider {
    std::vector<ProviderHit> hits;
    bool fail = false;
    int calls = 0;
    ListProvider(std::string id, std::vector<std::string> urls, bool enabled = true)
        : SearchProvider([&] {
              ProviderConfig c;
              c.id = id;
              c.enabled = enabled;
              return c;
          }()) {
        int rank = 1;
        for (auto& u : urls) hits.push_back({id, u, "title " + u, "", rank++, nlohmann::json::object()});
    }
    std::vector<ProviderHit> search(const Query&) override {
        ++calls;
        if (fail) throw ProviderError(id(), "HTTP 503");
        return hits;
    }
};

std::vector<std::string> urls(const std::string& prefix, int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("https://" + prefix + ".example/" + std::to_string(i));
    return out;
}

}  // namespace

TEST_CASE("canonicalize_url") {
    CHECK(canonicalize_url("HTTPS://StackOverflow.com/q/1/#answer") == "https://stackoverflow.com/q/1");
    CHECK(canonicalize_url("http://a.com/x?utm_source=y&b=1") == "http://a.com/x?b=1");
    CHECK(canonicalize_url("http://a.com/x?z=1&a=2&gclid=9&fbclid=3") == "http://a.com/x?a=2&z=1");
    CHECK(canonicalize_url("http://a.com/") == "http://a.com");
    CHECK(canonicalize_url("http://user@A.com:8080/P") == "http://user@a.com:8080/P");
    CHECK_THROWS_AS(canonicalize_url("notaurl"), InvalidUrl);
    CHECK_THROWS_AS(canonicalize_url(""), InvalidUrl);
    CHECK_THROWS_AS(canonicalize_url("http://"), InvalidUrl);
    CHECK_THROWS_AS(canonicalize_url("http://a b.com"), InvalidUrl);
    for (const std::string u : {"HTTPS://StackOverflow.com/q/1/#answer", "http://a.com/x?utm_source=y&b=1",
                                "https://x.org/a/b//?q=1&p=2#f", "http://h/?"})
        CHECK(canonicalize_url(canonicalize_url(u)) == canonicalize_url(u));
}

TEST_CASE("StackExchange: recorded response with two questions") {
    StubTransport t;
    t.response = ok_json(fx::read("stackexchange/two_questions.json"));
    ProviderConfig c;
    c.id = "stackoverflow";
    c.kind = "stackexchange";
    const auto hits = stackexchange_search(make_query("ConcurrentModificationException ArrayList"), c, t);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].provider_rank == 1);
    CHECK(hits[1].provider_rank == 2);
    CHECK(hits[0].provider_meta["score"] == 1379);
    CHECK(hits[0].provider_meta["answer_count"] == 31);
    CHECK(hits[0].provider_meta["is_answered"] == true);
    CHECK(hits[1].provider_meta["score"] == 2);
    CHECK(hits[1].title == "Why does my loop throw ConcurrentModificationException & how do I fix it?");
    REQUIRE(t.urls.size() == 1);
    CHECK(t.urls[0].find("q=ConcurrentModificationException%20ArrayList") != std::string::npos);
    CHECK(t.urls[0].find("site=stackoverflow") != std::string::npos);
    CHECK(t.urls[0].find("pagesize=30") != std::string::npos);
}

TEST_CASE("StackExchange: failures and empty results") {
    StubTransport t;
    ProviderConfig c;
    c.id = "stackoverflow";
    t.response.status = 503;
    CHECK_THROWS_AS(stackexchange_search(make_query("x"), c, t), ProviderError);
    t.response = ok_json("{not json");
    CHECK_THROWS_AS(stackexchange_search(make_query("x"), c, t), ProviderError);
    t.response = ok_json(R"({"error_id": 502, "error_message": "throttled"})");
    CHECK_THROWS_AS(stackexchange_search(make_query("x"), c, t), ProviderError);
    t.response = ok_json(fx::read("stackexchange/empty.json"));
    CHECK(stackexchange_search(make_query("x"), c, t).empty());
    try {
        t.response.status = 500;
        stackexchange_search(make_query("x"), c, t);
    } catch (const ProviderError& e) {
        CHECK(e.provider_id() == "stackoverflow");
    }
}

TEST_CASE("generic web search adapter maps fields") {
    StubTransport t;
    t.response = ok_json(R"({"webPages": {"value": [{"url": "https://a.example/1", "name": "A", "snippet": "s"},
                                                    {"name": "no url"},
                                                    {"url": "https://b.example/2", "name": "B"}]}})");
    ProviderConfig c;
    c.id = "bing";
    c.kind = "web";
    c.endpoint = "https://api.example/search";
    c.options = {{"items_path", "/webPages/value"}, {"url_field", "url"}, {"title_field", "name"},
                 {"count_param", "count"}};
    WebSearchProvider p(c, std::shared_ptr<HttpTransport>(&t, [](HttpTransport*) {}));
    const auto hits = p.search(make_query("npe java"));
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].title == "A");
    CHECK(hits[1].provider_rank == 2);
    CHECK(t.urls[0] == "https://api.example/search?q=npe%20java&count=30");
    t.response = ok_json("{}");
    CHECK(p.search(make_query("x")).empty());
}

TEST_CASE("merge: four disjoint providers of 30 give 120 entries") {
    std::vector<std::shared_ptr<SearchProvider>> ps;
    for (const auto* id : {"a", "b", "c", "d"}) ps.push_back(std::make_shared<ListProvider>(id, urls(id, 30)));
    const auto corpus = search_all(make_query("q"), ps);
    CHECK(corpus.entries.size() == 120);
    CHECK(corpus.providers_active == 4);
    CHECK(corpus.warnings.empty());
}

TEST_CASE("merge: duplicates collapse and order is by best rank then url") {
    auto a = std::make_shared<ListProvider>("a", std::vector<std::string>{"https://X.com/p#top", "https://y.com/q"});
    auto b = std::make_shared<ListProvider>(
        "b", std::vector<std::string>{"https://z.com/1", "https://z.com/2", "https://z.com/3", "https://z.com/4",
                                      "https://z.com/5", "https://z.com/6", "https://x.com/p/"});
    const auto corpus = search_all(make_query("q"), {a, b});
    REQUIRE(corpus.entries.size() == 8);
    const auto& first = corpus.entries[0];
    CHECK(first.canonical_url == "https://x.com/p");
    REQUIRE(first.hits.size() == 2);
    CHECK(first.hits[0].provider_rank == 1);
    CHECK(first.hits[1].provider_rank == 7);
    CHECK(corpus.entries[1].canonical_url == "https://z.com/1");
    CHECK(corpus.entries[2].canonical_url == "https://y.com/q");
    std::set<std::string> seen;
    for (const auto& e : corpus.entries) CHECK(seen.insert(e.canonical_url).second);
}

TEST_CASE("merge: one hit per provider even if a provider repeats a url") {
    auto a = std::make_shared<ListProvider>("a", std::vector<std::string>{"https://x.com/p", "https://x.com/p/"});
    const auto corpus = search_all(make_query("q"), {a});
    REQUIRE(corpus.entries.size() == 1);
    CHECK(corpus.entries[0].hits.size() == 1);
    CHECK(corpus.entries[0].hits[0].provider_rank == 1);
}

TEST_CASE("merge: the corpus is capped") {
    std::vector<std::shared_ptr<SearchProvider>> ps;
    for (const auto* id : {"a", "b", "c", "d", "e"}) ps.push_back(std::make_shared<ListProvider>(id, urls(id, 30)));
    CHECK(search_all(make_query("q"), ps).entries.size() == 120);
}

TEST_CASE("provider failures") {
    auto good = std::make_shared<ListProvider>("good", urls("g", 3));
    auto bad = std::make_shared<ListProvider>("bad", urls("b", 3));
    bad->fail = true;
    const auto corpus = search_all(make_query("q"), {good, bad});
    CHECK(corpus.entries.size() == 3);
    CHECK(corpus.providers_active == 1);
    REQUIRE(corpus.warnings.size() == 1);
    CHECK(corpus.warnings[0].find("bad") != std::string::npos);

    auto empty = std::make_shared<ListProvider>("empty", std::vector<std::string>{});
    CHECK_THROWS_AS(search_all(make_query("q"), {empty}), AllProvidersFailed);
    CHECK_THROWS_AS(search_all(make_query("q"), {bad}), AllProvidersFailed);
}

TEST_CASE("a disabled provider is never contacted") {
    auto on = std::make_shared<ListProvider>("on", urls("on", 2));
    auto off = std::make_shared<ListProvider>("off", urls("off", 2), false);
    const auto corpus = search_all(make_query("q"), {on, off});
    CHECK(off->calls == 0);
    CHECK(corpus.entries.size() == 2);
    CHECK_THROWS_AS(search_all(make_query("q"), {off}), AllProvidersFailed);
    CHECK(off->calls == 0);
}

TEST_CASE("MetaSearcher caches provider responses") {
    auto p = std::make_shared<ListProvider>("p", urls("p", 2));
    MetaSearcher searcher({p});
    searcher.search_all(make_query("one two"));
    searcher.search_all(make_query("one  two"));
    CHECK(p->calls == 1);
    searcher.search_all(make_query("three"));
    CHECK(p->calls == 2);
}

TEST_CASE("fixture provider replays files and falls back to the default") {
    const auto root = fx::dir() / "bench" / "cme" / "providers";
    ProviderConfig c;
    c.id = "stackoverflow";
    FixtureProvider p(c, root);
    const auto hits = p.search(make_query("anything"));
    CHECK(hits.size() == 30);
    CHECK(hits[0].provider_meta.contains("score"));
    CHECK(p.call_count() == 1);
    c.id = "missing";
    FixtureProvider none(c, root);
    CHECK_THROWS_AS(none.search(make_query("x")), ProviderError);
}

TEST_CASE("fixture key") {
    CHECK(fixture_key("Foo  Bar") == fixture_key("foo bar"));
    CHECK(fixture_key("foo bar").size() == 16);
    CHECK(fixture_key("foo") != fixture_key("bar"));
}

TEST_CASE("provider config json") {
    const auto c = ProviderConfig::from_json({{"id", "so"}, {"kind", "stackexchange"}, {"per_provider_limit", 10}});
    CHECK(c.per_provider_limit == 10);
    CHECK(c.timeout_ms == 10000);
    CHECK(ProviderConfig::from_json(c.to_json()).to_json() == c.to_json());
    CHECK_THROWS(ProviderConfig::from_json({{"id", "x"}, {"per_provider_limit", 0}}));
    CHECK_THROWS(ProviderConfig::from_json({{"kind", "web"}}));
}
