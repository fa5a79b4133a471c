#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "surf/query.hpp"
#include "surf/trace.hpp"

namespace surf {

struct WatchEvent {
    StackTrace trace;
    std::string trace_text;  // the detected lines, verbatim
    Query query;             // top recommended query for the trace
    std::chrono::system_clock::time_point timestamp;
    std::string source;
};

// Incremental trace detector over a console / log stream. Bytes arrive in
// arbitrary chunks; an event fires once a trace is known to be complete
// (a non-continuation line follows it, or the stream ends). Identical traces
// seen again within the debounce window are suppressed.
class TraceWatcher {
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;

    explicit TraceWatcher(std::string source, std::chrono::milliseconds debounce = std::chrono::seconds(10),
                          Clock clock = [] { return std::chrono::steady_clock::now(); },
                          QueryOptions query_options = {});

    std::vector<WatchEvent> feed(std::string_view chunk);
    // End of stream: the partial last line and any pending trace are final.
    std::vector<WatchEvent> flush();

    std::size_t buffered_lines() const { return lines_.size(); }

private:
    std::vector<WatchEvent> scan(bool final);
    std::optional<WatchEvent> make_event(const std::vector<std::string>& lines);

    std::string source_;
    std::chrono::milliseconds debounce_;
    Clock clock_;
    QueryOptions query_options_;
    std::string partial_;
    std::vector<std::string> lines_;
    std::map<std::string, std::chrono::steady_clock::time_point> last_seen_;
};

}  // namespace surf
