#include "surf/trace.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "surf/errors.hpp"
#include "surf/text.hpp"

namespace surf {

namespace {

const std::regex& header_re() {
    static const std::regex re(R"(^\s*(?:Exception in thread "[^"]*"\s+)?([A-Za-z_$][\w$.]*)(?::\s?(.*?))?\s*$)");
    return re;
}

// Optional "module/" or "loader//" prefix as printed by JDK 9+.
const std::regex& frame_re() {
    static const std::regex re(R"(^\s+at\s+(?:[\w$.@-]+/+)?([\w$.<>]+)\.([\w$<>]+)\((.*)\)\s*$)");
    return re;
}

const std::regex& cause_re() {
    static const std::regex re(R"(^\s*Caused by:\s+([A-Za-z_$][\w$.]*)(?::\s?(.*?))?\s*$)");
    return re;
}

const std::regex& elided_re() {
    static const std::regex re(R"(^\s+\.\.\. \d+ (?:more|common frames omitted)\s*$)");
    return re;
}

// std::regex backtracks recursively; pathological log lines are never trace lines.
constexpr std::size_t kMaxTraceLine = 4096;

bool match_line(const std::string& line, std::smatch& m, const std::regex& re) {
    return line.size() <= kMaxTraceLine && std::regex_match(line, m, re);
}

bool match_line(std::string_view line, const std::regex& re) {
    if (line.size() > kMaxTraceLine) return false;
    const std::string s(line);
    return std::regex_match(s, re);
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    if (text.empty()) return lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(pos));
            break;
        }
        lines.emplace_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

Frame parse_frame(const std::smatch& m, std::size_t depth) {
    Frame f;
    f.class_fq = m[1].str();
    f.method = m[2].str();
    f.depth = depth;
    const std::string location = m[3].str();
    if (location.empty() || location == "Unknown Source" || location == "Native Method") return f;
    const auto colon = location.rfind(':');
    if (colon != std::string::npos && text::is_numeric(location.substr(colon + 1))) {
        const int line = std::stoi(location.substr(colon + 1));
        f.file = location.substr(0, colon);
        if (line > 0) f.line = line;
    } else {
        f.file = location;
    }
    if (f.file && f.file->empty()) {
        f.file.reset();
        f.line.reset();
    }
    return f;
}

std::string last_segment(std::string_view s, char sep) {
    const auto pos = s.rfind(sep);
    return std::string(pos == std::string_view::npos ? s : s.substr(pos + 1));
}

std::vector<std::string> split_on(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool usable_token(std::string_view t) { return t.size() >= 3 && !text::is_numeric(t); }

const std::unordered_set<std::string>& method_stoplist() {
    static const std::unordered_set<std::string> stop{"main", "run", "invoke", "init", "clinit"};
    return stop;
}

// Method name with synthetic markers removed: "<init>" -> ["init"],
// "lambda$main$0" -> ["lambda", "main", "0"]. Only the first usable part is
// the frame's method token.
std::optional<std::string> method_token(std::string_view method) {
    std::string cleaned;
    for (char c : method)
        if (c != '<' && c != '>') cleaned.push_back(c);
    for (auto& part : split_on(cleaned, '$'))
        if (usable_token(part)) return part;
    return std::nullopt;
}

}  // namespace

namespace trace_grammar {
bool is_header(std::string_view line) { return match_line(line, header_re()); }
bool is_frame(std::string_view line) { return match_line(line, frame_re()); }
bool is_cause(std::string_view line) { return match_line(line, cause_re()); }
bool is_elided(std::string_view line) { return match_line(line, elided_re()); }
}  // namespace trace_grammar

std::string StackTrace::simple_name() const {
    return last_segment(last_segment(exception_type, '.'), '$');
}

bool operator==(const StackTrace& a, const StackTrace& b) {
    if (a.exception_type != b.exception_type || a.message != b.message || a.frames != b.frames) return false;
    if (!a.caused_by || !b.caused_by) return !a.caused_by && !b.caused_by;
    return *a.caused_by == *b.caused_by;
}

const char* to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::ExceptionType: return "exception";
        case TokenKind::ClassName: return "class";
        case TokenKind::MethodName: return "method";
    }
    return "?";
}

int ContextCode::count(std::string_view term) const {
    const auto it = identifier_bag.find(std::string(term));
    return it == identifier_bag.end() ? 0 : it->second;
}

const LanguageProfile& LanguageProfile::java() {
    static const LanguageProfile profile{
        "java",
        {"abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
         "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
         "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long", "native",
         "new", "package", "private", "protected", "public", "return", "short", "static", "strictfp",
         "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try", "void",
         "volatile", "while", "true", "false", "null", "var"},
        true,
        true};
    return profile;
}

std::vector<TraceSpan> detect_traces(std::string_view text) {
    using namespace trace_grammar;
    const auto lines = split_lines(text);
    const std::size_t n = lines.size();
    std::vector<TraceSpan> spans;
    std::size_t i = 0;
    while (i < n) {
        if (!(i + 1 < n && is_header(lines[i]) && is_frame(lines[i + 1]))) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (true) {
            while (j < n && (is_frame(lines[j]) || is_elided(lines[j]))) ++j;
            if (j + 1 < n && is_cause(lines[j]) && is_frame(lines[j + 1])) {
                ++j;
                continue;
            }
            break;
        }
        TraceSpan span;
        span.start = i;
        span.end = j;
        span.lines.assign(lines.begin() + static_cast<std::ptrdiff_t>(i),
                          lines.begin() + static_cast<std::ptrdiff_t>(j));
        spans.push_back(std::move(span));
        i = j;
    }
    return spans;
}

StackTrace parse_trace(const std::vector<std::string>& lines) {
    std::size_t i = 0;
    while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
    if (i == lines.size()) throw MalformedTrace("empty trace");

    std::smatch m;
    if (!match_line(lines[i], m, header_re()))
        throw MalformedTrace("unrecognised exception header: " + lines[i]);

    std::vector<StackTrace> segments(1);
    segments.back().exception_type = m[1].str();
    if (m[2].matched) segments.back().message = m[2].str();

    for (++i; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (match_line(line, m, frame_re())) {
            auto& seg = segments.back();
            seg.frames.push_back(parse_frame(m, seg.frames.size()));
        } else if (match_line(line, m, cause_re())) {
            StackTrace cause;
            cause.exception_type = m[1].str();
            if (m[2].matched) cause.message = m[2].str();
            segments.push_back(std::move(cause));
        }
        // elided "... n more" markers and stray lines carry no frames
    }

    for (const auto& seg : segments)
        if (seg.frames.empty()) throw MalformedTrace("no frames for " + seg.exception_type);

    for (std::size_t k = segments.size() - 1; k > 0; --k)
        segments[k - 1].caused_by = std::make_shared<const StackTrace>(std::move(segments[k]));
    return std::move(segments.front());
}

StackTrace parse_trace(std::string_view text) { return parse_trace(split_lines(text)); }

std::string render(const StackTrace& trace) {
    std::ostringstream out;
    const StackTrace* seg = &trace;
    bool first = true;
    while (seg) {
        if (!first) out << "Caused by: ";
        first = false;
        out << seg->exception_type;
        if (seg->message) out << ": " << *seg->message;
        out << '\n';
        for (const auto& f : seg->frames) {
            out << "\tat " << f.class_fq << '.' << f.method << '(';
            if (f.file) {
                out << *f.file;
                if (f.line) out << ':' << *f.line;
            } else {
                out << "Unknown Source";
            }
            out << ")\n";
        }
        seg = seg->caused_by.get();
    }
    return out.str();
}

std::vector<SegmentTokens> token_layout(const StackTrace& trace) {
    // "main" survives the stop list when it is the program entry point (bottom
    // frame of the outermost trace) or the only method token in the trace.
    std::unordered_set<std::string> distinct_methods;
    for (const StackTrace* seg = &trace; seg; seg = seg->caused_by.get())
        for (const auto& f : seg->frames)
            if (auto m = method_token(f.method)) distinct_methods.insert(*m);
    const bool main_is_only_method = distinct_methods.size() == 1 && distinct_methods.count("main");

    std::vector<SegmentTokens> layout;
    bool outermost = true;
    for (const StackTrace* seg = &trace; seg; seg = seg->caused_by.get()) {
        SegmentTokens st;
        if (auto name = seg->simple_name(); usable_token(name)) st.exception = name;
        for (std::size_t i = 0; i < seg->frames.size(); ++i) {
            const auto& f = seg->frames[i];
            FrameTokens ft;
            ft.depth = f.depth;
            for (auto& part : split_on(last_segment(f.class_fq, '.'), '$'))
                if (usable_token(part) &&
                    std::find(ft.classes.begin(), ft.classes.end(), part) == ft.classes.end())
                    ft.classes.push_back(part);
            if (auto m = method_token(f.method)) {
                const bool entry_frame = outermost && i + 1 == seg->frames.size();
                const bool stopped = method_stoplist().count(*m) &&
                                     !(*m == "main" && (entry_frame || main_is_only_method));
                if (!stopped) ft.method = *m;
            }
            st.frames.push_back(std::move(ft));
        }
        layout.push_back(std::move(st));
        outermost = false;
    }
    return layout;
}

std::vector<Token> extract_tokens(const StackTrace& trace) {
    std::vector<Token> tokens;
    auto add = [&](const std::string& text, TokenKind kind, std::size_t depth) {
        auto it = std::find_if(tokens.begin(), tokens.end(), [&](const Token& t) { return t.text == text; });
        if (it == tokens.end())
            tokens.push_back(Token{text, kind, depth});
        else
            it->min_depth = std::min(it->min_depth, depth);
    };
    for (const auto& seg : token_layout(trace)) {
        if (seg.exception) add(*seg.exception, TokenKind::ExceptionType, 0);
        for (const auto& f : seg.frames) {
            for (const auto& c : f.classes) add(c, TokenKind::ClassName, f.depth);
            if (f.method) add(*f.method, TokenKind::MethodName, f.depth);
        }
    }
    return tokens;
}

namespace {

// Blanks out comments and string/char literals so only code identifiers remain.
std::string strip_non_code(std::string_view src, const LanguageProfile& profile) {
    std::string out(src);
    std::size_t i = 0;
    const std::size_t n = out.size();
    while (i < n) {
        if (profile.c_style_comments && out[i] == '/' && i + 1 < n && out[i + 1] == '/') {
            while (i < n && out[i] != '\n') out[i++] = ' ';
        } else if (profile.c_style_comments && out[i] == '/' && i + 1 < n && out[i + 1] == '*') {
            out[i++] = ' ';
            out[i++] = ' ';
            while (i < n && !(out[i] == '*' && i + 1 < n && out[i + 1] == '/')) {
                if (out[i] != '\n') out[i] = ' ';
                ++i;
            }
            for (int k = 0; k < 2 && i < n; ++k) out[i++] = ' ';
        } else if (profile.quoted_literals && (out[i] == '"' || out[i] == '\'')) {
            const char quote = out[i];
            out[i++] = ' ';
            while (i < n && out[i] != quote && out[i] != '\n') {
                if (out[i] == '\\' && i + 1 < n) out[i++] = ' ';
                out[i++] = ' ';
            }
            if (i < n && out[i] == quote) out[i++] = ' ';
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace

ContextCode tokenize_code(std::string_view source, const LanguageProfile& profile) {
    ContextCode code;
    code.source_text = std::string(source);
    const std::string stripped = strip_non_code(source, profile);
    for (auto word : text::identifier_words(stripped)) {
        if (profile.keywords.count(std::string(word))) continue;
        for (auto& term : text::terms(word)) ++code.identifier_bag[term];
    }
    return code;
}

}  // namespace surf
