#include "surf/http.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "surf/errors.hpp"
#include "surf/search.hpp"

namespace surf {

namespace {

std::string canonical_or_same(const std::string& url) {
    try {
        return canonicalize_url(url);
    } catch (const InvalidUrl&) {
        return url;
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string HttpResponse::header(const std::string& lowercase_name) const {
    const auto it = headers.find(lowercase_name);
    return it == headers.end() ? std::string() : it->second;
}

void FixtureTransport::add(const std::string& url, HttpResponse response, int delay_ms) {
    std::lock_guard lock(mutex_);
    responses_[canonical_or_same(url)] = Canned{std::move(response), delay_ms};
}

void FixtureTransport::add_page(const std::string& url, std::string html) {
    HttpResponse r;
    r.status = 200;
    r.headers["content-type"] = "text/html; charset=utf-8";
    r.body = std::move(html);
    add(url, std::move(r));
}

void FixtureTransport::add_redirect(const std::string& url, const std::string& location, int status) {
    HttpResponse r;
    r.status = status;
    r.headers["location"] = location;
    add(url, std::move(r));
}

void FixtureTransport::load_directory(const std::filesystem::path& dir) {
    const auto index_path = dir / "index.json";
    if (!std::filesystem::exists(index_path)) return;
    const auto index = nlohmann::json::parse(read_file(index_path));
    for (const auto& [url, spec] : index.items()) {
        HttpResponse r;
        int delay = 0;
        if (spec.is_string()) {
            r.status = 200;
            r.body = read_file(dir / spec.get<std::string>());
        } else {
            r.status = spec.value("status", 200);
            if (spec.contains("file")) r.body = read_file(dir / spec["file"].get<std::string>());
            if (spec.contains("body")) r.body = spec["body"].get<std::string>();
            if (spec.contains("location")) r.headers["location"] = spec["location"].get<std::string>();
            delay = spec.value("delay_ms", 0);
        }
        if (r.status == 200) r.headers["content-type"] = "text/html; charset=utf-8";
        add(url, std::move(r), delay);
    }
}

HttpResponse FixtureTransport::get(const HttpRequest& request) {
    Canned canned;
    bool found = false;
    {
        std::lock_guard lock(mutex_);
        calls_.push_back(request.url);
        auto it = responses_.find(request.url);
        if (it == responses_.end()) it = responses_.find(canonical_or_same(request.url));
        if (it != responses_.end()) {
            canned = it->second;
            found = true;
        }
    }
    if (!found) {
        HttpResponse r;
        r.status = 404;
        return r;
    }
    if (canned.delay_ms > 0) {
        const int wait = std::min(canned.delay_ms, request.timeout_ms);
        std::this_thread::sleep_for(std::chrono::milliseconds(wait));
        if (canned.delay_ms > request.timeout_ms)
            throw TransportError("timeout after " + std::to_string(request.timeout_ms) + " ms: " + request.url);
    }
    if (canned.response.body.size() > request.max_body_bytes) {
        canned.response.body.resize(request.max_body_bytes);
        canned.response.truncated = true;
    }
    return canned.response;
}

std::vector<std::string> FixtureTransport::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::size_t FixtureTransport::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_.size();
}

std::string url_encode(std::string_view s) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0xf]);
        }
    }
    return out;
}

std::string resolve_url(const std::string& base, const std::string& location) {
    if (location.find("://") != std::string::npos) return location;
    const auto scheme_end = base.find("://");
    if (scheme_end == std::string::npos) return location;
    if (location.rfind("//", 0) == 0) return base.substr(0, scheme_end + 1) + location;
    const auto authority_end = base.find_first_of("/?#", scheme_end + 3);
    const std::string origin = base.substr(0, authority_end);
    if (!location.empty() && location.front() == '/') return origin + location;
    // relative path: replace the last path segment
    std::string path = authority_end == std::string::npos ? "/" : base.substr(authority_end);
    path = path.substr(0, path.find_first_of("?#"));
    path = path.substr(0, path.rfind('/') + 1);
    if (path.empty()) path = "/";
    return origin + path + location;
}

}  // namespace surf
