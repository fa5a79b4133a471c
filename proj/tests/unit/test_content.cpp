#include <doctest.h>

#include <random>

#include "support.hpp"
#include "surf/content.hpp"
#include "surf/errors.hpp"
#include "surf/http.hpp"
#include "surf/text.hpp"

using namespace surf;

TEST_CASE("extract_content basics") {
    const auto p = extract_content("<title>T</title><pre>x=1</pre>", "https://a.com");
    CHECK(p.title == "T");
    CHECK(p.code_blocks == std::vector<std::string>{"x=1"});
    CHECK(p.canonical_url == "https://a.com");

    CHECK(extract_content("<pre><code>y</code></pre>", "u").code_blocks == std::vector<std::string>{"y"});
    CHECK(extract_content("<h1>Head &amp; more</h1><p>text</p>", "u").title == "Head & more");
    CHECK(extract_content("<p>no title</p>", "u").title.empty());
}

TEST_CASE("script and style are not visible text") {
    const auto p = extract_content(
        "<html><head><style>p{color:red}</style><script>var s = '<pre>x</pre>';</script></head>"
        "<body><p>Hello   <b>world</b></p>\n<!-- <code>hidden</code> --></body></html>",
        "u");
    CHECK(p.body_text == "Hello world");
    CHECK(p.code_blocks.empty());
}

TEST_CASE("entities") {
    CHECK(decode_entities("a &lt;b&gt; &amp;&quot;&#39;&#x41;&#65;&nbsp;&unknown;") == "a <b> &\"'AA &unknown;");
    CHECK(decode_entities("&#x1F600;") == "\xF0\x9F\x98\x80");
    CHECK(decode_entities("&") == "&");
}

TEST_CASE("recorded StackOverflow question page") {
    const auto html = fx::read("pages/so_question.html");
    const auto expected = nlohmann::json::parse(fx::read("pages/so_question.expected.json"));
    const auto p = extract_content(html, "https://stackoverflow.com/questions/1/why-cme");
    CHECK(p.title == expected["title"].get<std::string>());
    CHECK(p.code_blocks.size() == expected["code_blocks"].get<std::size_t>());
    CHECK(p.code_blocks[2].find("java.util.ArrayList$Itr.checkForComodification") != std::string::npos);
    CHECK(p.body_text.find("StackExchange.init") == std::string::npos);
    CHECK(p.body_text.find("What am I doing wrong?") != std::string::npos);
    // every block is a piece of the document once whitespace is normalised
    const auto doc = text::collapse_whitespace(decode_entities(html));
    for (const auto& block : p.code_blocks) CHECK(doc.find(text::collapse_whitespace(block)) != std::string::npos);
}

TEST_CASE("extraction survives arbitrary bytes") {
    std::mt19937 rng(99);
    const std::string alphabet = "<>/=\"' &;#abcdeprtx-!\n\t\x80\xff";
    const std::vector<std::string> pieces = {"<pre>", "</pre>", "<code>", "</code>", "<blockquote>", "<script>",
                                             "</script>", "<title>", "<!--", "-->", "&#x", "<style", "</"};
    for (int round = 0; round < 500; ++round) {
        std::string s;
        const int len = static_cast<int>(rng() % 200);
        for (int i = 0; i < len; ++i) {
            if (rng() % 4 == 0)
                s += pieces[rng() % pieces.size()];
            else
                s += alphabet[rng() % alphabet.size()];
        }
        const auto a = extract_content(s, "u");
        const auto b = extract_content(s, "u");
        CHECK(same_content(a, b));
    }
}

TEST_CASE("page cache round trip and expiry") {
    fx::TempDir tmp;
    auto now = std::chrono::system_clock::time_point(std::chrono::seconds(1'700'000'000));
    PageCache cache(tmp.path, std::chrono::hours(1), [&] { return now; });
    auto page = extract_content("<title>T</title><p>body</p><code>c()</code>", "https://a.com/x");
    page.fetched_at = now;
    cache.store(page);

    const auto path = cache.path_for("https://a.com/x");
    CHECK(std::filesystem::exists(path));
    CHECK(path.parent_path().filename().string().size() == 2);
    CHECK(path.filename() == text::sha256_hex("https://a.com/x") + ".json");

    const auto loaded = cache.load("https://a.com/x");
    REQUIRE(loaded);
    CHECK(same_content(*loaded, page));
    CHECK(loaded->from_cache);

    now += std::chrono::minutes(61);
    CHECK_FALSE(cache.load("https://a.com/x"));
    CHECK_FALSE(cache.load("https://never.stored"));

    std::ofstream(cache.path_for("https://bad.entry")) << "{broken";
    CHECK_FALSE(cache.load("https://bad.entry"));
}

TEST_CASE("fetch_page uses the cache before the network") {
    fx::TempDir tmp;
    FixtureTransport t;
    t.add_page("https://a.com/x", "<title>Live</title>");
    PageCache cache(tmp.path);
    const auto first = fetch_page("https://a.com/x", &cache, t);
    CHECK(first.title == "Live");
    CHECK_FALSE(first.from_cache);
    CHECK(t.call_count() == 1);
    const auto second = fetch_page("https://a.com/x", &cache, t);
    CHECK(second.from_cache);
    CHECK(t.call_count() == 1);
}

TEST_CASE("fetch_page errors and redirects") {
    FixtureTransport t;
    CHECK_THROWS_AS(fetch_page("https://a.com/missing", nullptr, t), FetchError);

    t.add_redirect("https://a.com/1", "https://a.com/2", 301);
    t.add_redirect("https://a.com/2", "/final", 302);
    t.add_page("https://a.com/final", "<title>Final</title>");
    const auto p = fetch_page("https://a.com/1", nullptr, t);
    CHECK(p.title == "Final");
    CHECK(p.canonical_url == "https://a.com/1");
    CHECK(t.call_count() == 4);

    t.add_redirect("https://loop.com/a", "https://loop.com/b");
    t.add_redirect("https://loop.com/b", "https://loop.com/a");
    CHECK_THROWS_AS(fetch_page("https://loop.com/a", nullptr, t), FetchError);

    HttpResponse slow;
    slow.status = 200;
    slow.body = "<title>slow</title>";
    t.add("https://slow.com", slow, 500);
    FetchOptions quick;
    quick.timeout_ms = 20;
    CHECK_THROWS_AS(fetch_page("https://slow.com", nullptr, t, quick), FetchError);
}

TEST_CASE("oversized bodies are truncated, not rejected") {
    FixtureTransport t;
    t.add_page("https://big.com", "<title>Big</title><p>" + std::string(3 * 1024 * 1024, 'a') + "</p>");
    const auto p = fetch_page("https://big.com", nullptr, t);
    CHECK(p.title == "Big");
    CHECK(p.body_text.size() <= kMaxBodyBytes);
}

TEST_CASE("fetch_all reports failures") {
    FixtureTransport t;
    t.add_page("https://a.com/1", "<title>1</title>");
    t.add_page("https://a.com/2", "<title>2</title>");
    PageFetcher f(std::shared_ptr<HttpTransport>(&t, [](HttpTransport*) {}), nullptr);
    std::vector<std::string> failures;
    const auto pages = f.fetch_all({"https://a.com/1", "https://a.com/2", "https://a.com/3"}, &failures);
    CHECK(pages.size() == 2);
    CHECK(pages.at("https://a.com/2").title == "2");
    REQUIRE(failures.size() == 1);
    CHECK(failures[0].find("https://a.com/3") != std::string::npos);
}

TEST_CASE("resolve_url") {
    CHECK(resolve_url("https://a.com/x/y", "/z") == "https://a.com/z");
    CHECK(resolve_url("https://a.com/x/y", "z") == "https://a.com/x/z");
    CHECK(resolve_url("https://a.com/x", "http://b.com/") == "http://b.com/");
    CHECK(resolve_url("https://a.com/x", "//c.com/p") == "https://c.com/p");
}
