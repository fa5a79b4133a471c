#include <curl/curl.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <memory>
#include <mutex>

#include "surf/errors.hpp"
#include "surf/http.hpp"
#include "surf/text.hpp"

namespace surf {

namespace {

struct Sink {
    std::string body;
    std::size_t limit = kMaxBodyBytes;
    bool truncated = false;
};

std::size_t write_body(char* data, std::size_t size, std::size_t nmemb, void* user) {
    auto* sink = static_cast<Sink*>(user);
    const std::size_t n = size * nmemb;
    const std::size_t room = sink->limit > sink->body.size() ? sink->limit - sink->body.size() : 0;
    if (n > room) sink->truncated = true;
    sink->body.append(data, std::min(n, room));
    return n;  // keep draining so curl does not report a write error
}

std::size_t write_header(char* data, std::size_t size, std::size_t nmemb, void* user) {
    auto* headers = static_cast<std::map<std::string, std::string>*>(user);
    const std::string_view line(data, size * nmemb);
    const auto colon = line.find(':');
    if (colon != std::string_view::npos)
        (*headers)[text::to_lower(text::trim(line.substr(0, colon)))] = text::trim(line.substr(colon + 1));
    return size * nmemb;
}

void global_init() {
    static std::once_flag once;
    std::call_once(once, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

}  // namespace

CurlTransport::CurlTransport() {
    global_init();
    if (const char* proxy = std::getenv("SURF_HTTP_PROXY")) proxy_ = proxy;
}

HttpResponse CurlTransport::get(const HttpRequest& request) {
    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
    if (!curl) throw TransportError("curl_easy_init failed");

    Sink sink;
    sink.limit = request.max_body_bytes;
    HttpResponse response;

    curl_slist* raw_headers = nullptr;
    for (const auto& [name, value] : request.headers)
        raw_headers = curl_slist_append(raw_headers, (name + ": " + value).c_str());
    std::unique_ptr<curl_slist, decltype(&curl_slist_free_all)> headers(raw_headers, curl_slist_free_all);

    CURL* h = curl.get();
    curl_easy_setopt(h, CURLOPT_URL, request.url.c_str());
    curl_easy_setopt(h, CURLOPT_HTTPGET, 1L);
    curl_easy_setopt(h, CURLOPT_FOLLOWLOCATION, 0L);
    curl_easy_setopt(h, CURLOPT_NOSIGNAL, 1L);
    curl_easy_setopt(h, CURLOPT_TIMEOUT_MS, static_cast<long>(request.timeout_ms));
    curl_easy_setopt(h, CURLOPT_ACCEPT_ENCODING, "");  // StackExchange always gzips
    curl_easy_setopt(h, CURLOPT_USERAGENT, "surf/0.1");
    curl_easy_setopt(h, CURLOPT_WRITEFUNCTION, write_body);
    curl_easy_setopt(h, CURLOPT_WRITEDATA, &sink);
    curl_easy_setopt(h, CURLOPT_HEADERFUNCTION, write_header);
    curl_easy_setopt(h, CURLOPT_HEADERDATA, &response.headers);
    if (headers) curl_easy_setopt(h, CURLOPT_HTTPHEADER, headers.get());
    if (!proxy_.empty()) curl_easy_setopt(h, CURLOPT_PROXY, proxy_.c_str());

    const CURLcode rc = curl_easy_perform(h);
    if (rc != CURLE_OK) throw TransportError(std::string(curl_easy_strerror(rc)) + ": " + request.url);

    long status = 0;
    curl_easy_getinfo(h, CURLINFO_RESPONSE_CODE, &status);
    response.status = static_cast<int>(status);
    response.body = std::move(sink.body);
    response.truncated = sink.truncated;
    return response;
}

}  // namespace surf
