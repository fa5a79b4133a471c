#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace surf {

struct Frame {
    std::string class_fq;
    std::string method;
    std::optional<std::string> file;
    std::optional<int> line;  // only set together with `file`
    std::size_t depth = 0;    // 0 = throw site

    bool operator==(const Frame&) const = default;
};

// A parsed JVM exception. Frames are ordered top (throw site) to bottom.
struct StackTrace {
    std::string exception_type;
    std::optional<std::string> message;
    std::vector<Frame> frames;
    std::shared_ptr<const StackTrace> caused_by;

    // "java.util.ConcurrentModificationException" -> "ConcurrentModificationException"
    std::string simple_name() const;

    friend bool operator==(const StackTrace& a, const StackTrace& b);
};

enum class TokenKind { ExceptionType, ClassName, MethodName };

const char* to_string(TokenKind kind);

struct Token {
    std::string text;
    TokenKind kind = TokenKind::ClassName;
    std::size_t min_depth = 0;

    bool operator==(const Token&) const = default;
};

// Lexical profile for context code: which identifiers are language keywords
// and how comments / literals are delimited.
struct LanguageProfile {
    std::string name;
    std::unordered_set<std::string> keywords;
    bool c_style_comments = true;
    bool quoted_literals = true;

    static const LanguageProfile& java();
};

struct ContextCode {
    std::string source_text;
    std::map<std::string, int> identifier_bag;

    int count(std::string_view term) const;
    bool empty() const { return identifier_bag.empty(); }
};

struct TraceSpan {
    std::size_t start = 0;  // first line index (inclusive)
    std::size_t end = 0;    // one past the last line
    std::vector<std::string> lines;
};

// Finds every maximal run of lines shaped like a JVM stack trace
// (header, one or more frames, optional "Caused by:" segments).
std::vector<TraceSpan> detect_traces(std::string_view text);

// Throws MalformedTrace when the header is missing or no frame parses.
StackTrace parse_trace(const std::vector<std::string>& lines);
StackTrace parse_trace(std::string_view text);

// Canonical rendering: `<type>[: <message>]`, then `\tat cls.m(file:line)` per
// frame, then `Caused by: ` + the nested trace.
std::string render(const StackTrace& trace);

std::vector<Token> extract_tokens(const StackTrace& trace);

// Per-frame view of the filtered tokens, shared by token extraction and the
// token graph. One SegmentTokens per trace in the cause chain, outermost first.
struct FrameTokens {
    std::vector<std::string> classes;   // simple class parts, outer to inner
    std::optional<std::string> method;  // absent when filtered out
    std::size_t depth = 0;
};

struct SegmentTokens {
    std::optional<std::string> exception;
    std::vector<FrameTokens> frames;
};

std::vector<SegmentTokens> token_layout(const StackTrace& trace);

ContextCode tokenize_code(std::string_view source,
                          const LanguageProfile& profile = LanguageProfile::java());

namespace trace_grammar {
bool is_header(std::string_view line);
bool is_frame(std::string_view line);
bool is_cause(std::string_view line);
bool is_elided(std::string_view line);  // "... 3 more"
}  // namespace trace_grammar

}  // namespace surf
