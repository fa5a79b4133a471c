#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "support.hpp"
#include "surf/config.hpp"
#include "surf/engine.hpp"
#include "surf/service.hpp"

using namespace surf;

namespace {

std::shared_ptr<Engine> cme_engine() { return Engine::for_fixtures(fx::dir() / "bench" / "cme", Config::defaults()); }

std::string body(const nlohmann::json& j) { return j.dump(); }

nlohmann::json sample_request() {
    return {{"trace_text", fx::sample_trace()}, {"context_code", fx::sample_code()}};
}

}  // namespace

TEST_CASE("POST /api/queries") {
    auto engine = cme_engine();
    const auto r = api_queries(*engine, body(sample_request()));
    REQUIRE(r.status == 200);
    REQUIRE(r.body["queries"].size() == 5);
    for (const auto& q : r.body["queries"]) {
        CHECK(q["text"].get<std::string>().find("ConcurrentModificationException") != std::string::npos);
        CHECK(q.contains("score"));
        CHECK(q["tokens"].is_array());
    }
    CHECK(r.body["graph_dot"].get<std::string>().rfind("digraph", 0) == 0);
    CHECK(api_queries(*engine, body(sample_request())).body == r.body);
}

TEST_CASE("POST /api/queries errors") {
    auto engine = cme_engine();
    CHECK(api_queries(*engine, "{}").status == 400);
    CHECK(api_queries(*engine, "not json").status == 400);
    CHECK(api_queries(*engine, body({{"trace_text", "nothing like a trace"}})).status == 400);
    CHECK(api_queries(*engine, body({{"trace_text", "x.Ex\n\tat a.run(A.java:1)\n"}})).status == 422);
    const auto two = api_queries(*engine, body({{"trace_text", "x.Ex\n\tat a.Store.save(A.java:1)\n"}}));
    REQUIRE(two.status == 200);
    CHECK(two.body["queries"].size() == 1);
}

TEST_CASE("POST /api/search on the fixture scenario") {
    auto engine = cme_engine();
    const auto r = api_search(*engine, body(sample_request()));
    REQUIRE(r.status == 200);
    REQUIRE(r.body["results"].size() == 30);
    int rank = 1;
    for (const auto& row : r.body["results"]) {
        CHECK(row["rank"] == rank++);
        for (const auto* k : {"content_relevance", "context_relevance", "engine_confidence", "popularity",
                              "final_score"}) {
            const double v = row[k].get<double>();
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(row["providers"].is_array());
        CHECK(row.contains("url"));
        CHECK(row.contains("title"));
    }
    CHECK(r.body["warnings"].is_array());
    CHECK(api_search(*engine, body(sample_request())).body.dump() == r.body.dump());
}

TEST_CASE("query-only search without context") {
    auto engine = cme_engine();
    const auto r = api_search(*engine, body({{"query", "ConcurrentModificationException ArrayList"},
                                             {"associate_context", false}}));
    REQUIRE(r.status == 200);
    for (const auto& row : r.body["results"]) CHECK(row["context_relevance"] == 0.0);
}

TEST_CASE("POST /api/search errors") {
    auto engine = cme_engine();
    CHECK(api_search(*engine, "{}").status == 400);
    CHECK(api_search(*engine, body({{"query", "x"}, {"weights", {1, 1, 0, 0}}})).status == 400);
    CHECK(api_search(*engine, body({{"query", "x"}, {"associate_context", "yes"}})).status == 400);

    auto cfg = Config::defaults();
    for (auto& p : cfg.providers) p.enabled = false;
    Engine none(cfg, std::make_shared<FixtureTransport>());
    CHECK(api_search(none, body({{"query", "x"}})).status == 502);
}

TEST_CASE("weights override in the request") {
    auto engine = cme_engine();
    const auto r = api_search(*engine, body({{"query", "ConcurrentModificationException"},
                                             {"associate_context", false},
                                             {"weights", {0, 0, 0, 1}}}));
    REQUIRE(r.status == 200);
    const auto& rows = r.body["results"];
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i - 1]["popularity"].get<double>() >= rows[i]["popularity"].get<double>());
}

TEST_CASE("listen address") {
    CHECK(parse_listen_address("127.0.0.1:7878") == std::pair<std::string, int>{"127.0.0.1", 7878});
    CHECK_THROWS_AS(parse_listen_address("7878"), std::invalid_argument);
    CHECK_THROWS_AS(parse_listen_address("h:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_listen_address("h:abc"), std::invalid_argument);
}

TEST_CASE("health stays responsive while a search is slow") {
    fx::TempDir tmp;
    // one provider that takes 1.5 s to answer
    std::filesystem::create_directories(tmp.path / "providers" / "slow");
    std::ofstream(tmp.path / "providers" / "slow" / "_default.json")
        << R"({"delay_ms": 1500, "hits": [{"url": "https://a.example/1", "title": "A"}]})";
    Service service(Engine::for_fixtures(tmp.path, Config::defaults()));
    const int port = service.bind_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server([&] { service.listen_after_bind(); });
    service.wait_until_ready();

    std::thread slow([&] {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(10, 0);
        const auto r = c.Post("/api/search", R"({"query": "anything"})", "application/json");
        CHECK(r);
        if (r) CHECK(r->status == 200);
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    httplib::Client c("127.0.0.1", port);
    const auto start = std::chrono::steady_clock::now();
    const auto health = c.Get("/health");
    const auto took = std::chrono::steady_clock::now() - start;
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(nlohmann::json::parse(health->body) == nlohmann::json{{"status", "ok"}});
    CHECK(took < std::chrono::milliseconds(500));

    const auto none = c.Get("/api/watch/latest");
    REQUIRE(none);
    CHECK(none->status == 204);

    slow.join();
    service.stop();
    server.join();
}

TEST_CASE("latest watch event over HTTP") {
    Service service(cme_engine());
    const int port = service.bind_any_port("127.0.0.1");
    std::thread server([&] { service.listen_after_bind(); });
    service.wait_until_ready();

    TraceWatcher w("stdin");
    auto events = w.feed(fx::sample_trace());
    auto tail = w.flush();
    events.insert(events.end(), tail.begin(), tail.end());
    REQUIRE(events.size() == 1);
    service.publish(events[0]);

    httplib::Client c("127.0.0.1", port);
    const auto r = c.Get("/api/watch/latest");
    REQUIRE(r);
    CHECK(r->status == 200);
    const auto j = nlohmann::json::parse(r->body);
    CHECK(j["exception_type"] == "java.util.ConcurrentModificationException");
    CHECK(j["query"].get<std::string>().find("ConcurrentModificationException") == 0);

    const auto post = c.Post("/api/queries", sample_request().dump(), "application/json");
    REQUIRE(post);
    CHECK(post->status == 200);
    CHECK(post->get_header_value("Content-Type") == "application/json");
    service.stop();
    server.join();
}
