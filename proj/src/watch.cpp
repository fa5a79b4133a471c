#include "surf/watch.hpp"

#include <algorithm>

#include "surf/errors.hpp"
#include "surf/graph.hpp"

namespace surf {

namespace {

constexpr std::size_t kMaxBufferedLines = 10000;

std::string join_lines(const std::vector<std::string>& lines, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        out += lines[i];
        if (i + 1 < end) out += '\n';
    }
    return out;
}

}  // namespace

TraceWatcher::TraceWatcher(std::string source, std::chrono::milliseconds debounce, Clock clock,
                           QueryOptions query_options)
    : source_(std::move(source)), debounce_(debounce), clock_(std::move(clock)), query_options_(query_options) {}

std::vector<WatchEvent> TraceWatcher::feed(std::string_view chunk) {
    partial_.append(chunk);
    std::size_t start = 0;
    for (std::size_t nl; (nl = partial_.find('\n', start)) != std::string::npos; start = nl + 1) {
        std::string line = partial_.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines_.push_back(std::move(line));
    }
    partial_.erase(0, start);
    return scan(false);
}

std::vector<WatchEvent> TraceWatcher::flush() {
    if (!partial_.empty()) {
        if (partial_.back() == '\r') partial_.pop_back();
        lines_.push_back(std::move(partial_));
        partial_.clear();
    }
    return scan(true);
}

std::vector<WatchEvent> TraceWatcher::scan(bool final) {
    std::vector<WatchEvent> events;
    const auto spans = detect_traces(join_lines(lines_, 0, lines_.size()));

    // Lines before `keep_from` can never start a future trace. Outside an
    // unfinished span only the last line (a header awaiting frames) can.
    const std::size_t last_line = lines_.empty() ? 0 : lines_.size() - 1;
    std::size_t keep_from = last_line;
    for (const auto& span : spans) {
        const bool followed = span.end < lines_.size();
        const bool complete = final || span.end + 1 < lines_.size() ||
                              (followed && !trace_grammar::is_cause(lines_[span.end]));
        if (!complete) {
            keep_from = span.start;
            break;
        }
        if (auto event = make_event(span.lines)) events.push_back(std::move(*event));
        keep_from = std::max(span.end, last_line);
    }
    if (final) {
        lines_.clear();
    } else {
        if (lines_.size() - keep_from > kMaxBufferedLines) keep_from = lines_.size() - kMaxBufferedLines;
        lines_.erase(lines_.begin(), lines_.begin() + static_cast<std::ptrdiff_t>(keep_from));
    }
    return events;
}

std::optional<WatchEvent> TraceWatcher::make_event(const std::vector<std::string>& lines) {
    WatchEvent event;
    try {
        event.trace = parse_trace(lines);
    } catch (const MalformedTrace&) {
        return std::nullopt;
    }
    const auto now = clock_();
    std::erase_if(last_seen_, [&](const auto& kv) { return now - kv.second >= debounce_; });
    const auto key = render(event.trace);
    if (auto it = last_seen_.find(key); it != last_seen_.end() && now - it->second < debounce_) return std::nullopt;
    last_seen_[key] = now;

    event.trace_text = join_lines(lines, 0, lines.size());
    event.timestamp = std::chrono::system_clock::now();
    event.source = source_;
    try {
        const auto scores = token_scores(event.trace, ContextCode{});
        event.query = formulate_queries(scores, event.trace.simple_name(), query_options_).front();
    } catch (const EmptyTokenSet&) {
        event.query = make_query(event.trace.simple_name());
    }
    return event;
}

}  // namespace surf
