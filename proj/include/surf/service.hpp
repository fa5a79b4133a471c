#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "surf/engine.hpp"
#include "surf/watch.hpp"

namespace surf {

struct ApiReply {
    int status = 200;
    nlohmann::json body;
};

// Request handlers, independent of the HTTP server. Errors map to
// 400 (bad request / MalformedTrace), 422 (EmptyTokenSet), 502 (AllProvidersFailed).
ApiReply api_queries(const Engine& engine, const std::string& body);
ApiReply api_search(Engine& engine, const std::string& body);

nlohmann::json watch_event_json(const WatchEvent& event);

struct ServiceOptions {
    std::filesystem::path static_dir;  // web UI bundle, served at /
};

// JSON HTTP front end: POST /api/queries, POST /api/search, GET /health,
// GET /api/watch/latest. Requests are served concurrently from a thread pool.
class Service {
public:
    Service(std::shared_ptr<Engine> engine, ServiceOptions options = {});
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Blocks until stop().
    bool listen(const std::string& host, int port);
    // Binds an ephemeral port and returns it; call listen_after_bind() next.
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

    void publish(const WatchEvent& event);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// "host:port" -> parts; throws std::invalid_argument.
std::pair<std::string, int> parse_listen_address(const std::string& address);

}  // namespace surf
