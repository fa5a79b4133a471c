#include "surf/service.hpp"

#include <httplib.h>

#include "surf/errors.hpp"

namespace surf {

namespace {

ApiReply error_reply(int status, const std::string& kind, const std::string& message) {
    return {status, {{"error", message}, {"kind", kind}}};
}

std::optional<nlohmann::json> parse_body(const std::string& body) {
    try {
        return nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

template <typename Fn>
ApiReply guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const MalformedTrace& e) {
        return error_reply(400, e.kind(), e.what());
    } catch (const EmptyTokenSet& e) {
        return error_reply(422, e.kind(), e.what());
    } catch (const AllProvidersFailed& e) {
        return error_reply(502, e.kind(), e.what());
    } catch (const EmptyCorpus& e) {
        return error_reply(502, e.kind(), e.what());
    } catch (const std::invalid_argument& e) {
        return error_reply(400, "InvalidRequest", e.what());
    } catch (const std::exception& e) {
        return error_reply(500, "InternalError", e.what());
    }
}

}  // namespace

ApiReply api_queries(const Engine& engine, const std::string& body) {
    return guarded([&]() -> ApiReply {
        const auto json = parse_body(body);
        if (!json || !json->is_object()) return error_reply(400, "InvalidRequest", "body must be a JSON object");
        const auto trace = json->value("trace_text", std::string());
        if (trace.empty()) return error_reply(400, "InvalidRequest", "trace_text is required");
        const auto code = json->value("context_code", std::string());
        return {200, queries_json(engine.recommend(trace, code))};
    });
}

ApiReply api_search(Engine& engine, const std::string& body) {
    return guarded([&]() -> ApiReply {
        const auto json = parse_body(body);
        if (!json) return error_reply(400, "InvalidRequest", "body is not valid JSON");
        return {200, search_json(engine.search(SearchRequest::from_json(*json)))};
    });
}

nlohmann::json watch_event_json(const WatchEvent& event) {
    return {{"exception_type", event.trace.exception_type},
            {"query", event.query.text},
            {"trace", event.trace_text},
            {"source", event.source},
            {"timestamp",
             std::chrono::duration_cast<std::chrono::milliseconds>(event.timestamp.time_since_epoch()).count()}};
}

std::pair<std::string, int> parse_listen_address(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos || colon == 0) throw std::invalid_argument("listen address must be host:port");
    int port = 0;
    try {
        port = std::stoi(address.substr(colon + 1));
    } catch (const std::exception&) {
        throw std::invalid_argument("bad port in " + address);
    }
    if (port <= 0 || port > 65535) throw std::invalid_argument("bad port in " + address);
    return {address.substr(0, colon), port};
}

struct Service::Impl {
    std::shared_ptr<Engine> engine;
    httplib::Server server;
    std::mutex event_mutex;
    std::optional<nlohmann::json> latest_event;
};

Service::Service(std::shared_ptr<Engine> engine, ServiceOptions options) : impl_(std::make_unique<Impl>()) {
    impl_->engine = std::move(engine);
    auto& server = impl_->server;
    auto* impl = impl_.get();

    auto reply = [](httplib::Response& res, const ApiReply& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };

    server.Get("/health", [reply](const httplib::Request&, httplib::Response& res) {
        reply(res, {200, {{"status", "ok"}}});
    });
    server.Post("/api/queries", [impl, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, api_queries(*impl->engine, req.body));
    });
    server.Post("/api/search", [impl, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, api_search(*impl->engine, req.body));
    });
    server.Get("/api/watch/latest", [impl, reply](const httplib::Request&, httplib::Response& res) {
        std::lock_guard lock(impl->event_mutex);
        if (impl->latest_event)
            reply(res, {200, *impl->latest_event});
        else
            reply(res, {204, nullptr});
    });
    if (!options.static_dir.empty()) server.set_mount_point("/", options.static_dir.string());
}

Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int Service::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

void Service::publish(const WatchEvent& event) {
    std::lock_guard lock(impl_->event_mutex);
    impl_->latest_event = watch_event_json(event);
}

}  // namespace surf
