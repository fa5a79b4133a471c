#include "surf/content.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "surf/errors.hpp"
#include "surf/text.hpp"

namespace surf {

namespace {

// Case-insensitive find of `needle` (ASCII) starting at `from`.
std::size_t ifind(std::string_view hay, std::string_view needle, std::size_t from) {
    if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
    for (std::size_t i = from; i + needle.size() <= hay.size(); ++i)
        if (text::starts_with_icase(hay.substr(i), needle)) return i;
    return std::string_view::npos;
}

void append_utf8(std::string& out, unsigned long cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

const std::unordered_map<std::string, unsigned long>& named_entities() {
    static const std::unordered_map<std::string, unsigned long> names{
        {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},     {"apos", '\''},
        {"nbsp", ' '},     {"copy", 0xA9},    {"reg", 0xAE},     {"hellip", 0x2026}, {"mdash", 0x2014},
        {"ndash", 0x2013}, {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C}, {"rdquo", 0x201D},
        {"laquo", 0xAB},   {"raquo", 0xBB},   {"times", 0xD7},   {"middot", 0xB7},  {"bull", 0x2022}};
    return names;
}

bool is_capture_tag(std::string_view name) { return name == "code" || name == "pre" || name == "blockquote"; }

bool is_block_tag(std::string_view name) {
    static const char* const kBlocks[] = {"p", "div", "li", "tr", "br", "hr", "h1", "h2", "h3", "h4",
                                          "h5", "h6", "ul", "ol", "table", "section", "article"};
    return std::any_of(std::begin(kBlocks), std::end(kBlocks), [&](const char* b) { return name == b; });
}

struct Tag {
    std::string name;  // lowercased
    bool closing = false;
    bool self_closing = false;
    std::size_t end = 0;  // index just past '>'
};

// Parses a tag starting at html[pos] == '<'. Returns nullopt when the '<'
// does not start a tag (it is then plain text).
std::optional<Tag> parse_tag(std::string_view html, std::size_t pos) {
    std::size_t i = pos + 1;
    Tag tag;
    if (i < html.size() && html[i] == '/') {
        tag.closing = true;
        ++i;
    }
    const std::size_t name_start = i;
    if (i >= html.size() || !std::isalpha(static_cast<unsigned char>(html[i]))) return std::nullopt;
    while (i < html.size() && (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == '-' || html[i] == ':'))
        ++i;
    tag.name = text::to_lower(html.substr(name_start, i - name_start));
    char quote = 0;
    for (; i < html.size(); ++i) {
        const char c = html[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            tag.self_closing = i > pos && html[i - 1] == '/';
            tag.end = i + 1;
            return tag;
        }
    }
    tag.end = html.size();  // unterminated tag swallows the rest
    return tag;
}

// Skips raw-text content (script/style/title) up to its closing tag.
// Returns {content, index after the closing tag}.
std::pair<std::string_view, std::size_t> raw_text(std::string_view html, std::size_t from, std::string_view name) {
    const std::string closing = "</" + std::string(name);
    const auto close = ifind(html, closing, from);
    if (close == std::string_view::npos) return {html.substr(from), html.size()};
    const auto gt = html.find('>', close);
    return {html.substr(from, close - from), gt == std::string_view::npos ? html.size() : gt + 1};
}

std::string latin1_to_utf8(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) append_utf8(out, c);
    return out;
}

std::string finish_block(const std::string& raw) {
    std::string decoded = decode_entities(raw);
    decoded.erase(std::remove(decoded.begin(), decoded.end(), '\r'), decoded.end());
    return text::trim(decoded);
}

}  // namespace

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        const auto semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(s[i++]);
            continue;
        }
        const std::string_view ref = s.substr(i + 1, semi - i - 1);
        bool ok = false;
        if (ref.size() >= 2 && ref[0] == '#') {
            const bool hex = ref[1] == 'x' || ref[1] == 'X';
            const std::string digits(ref.substr(hex ? 2 : 1));
            const bool valid =
                !digits.empty() && std::all_of(digits.begin(), digits.end(), [&](unsigned char c) {
                    return hex ? std::isxdigit(c) != 0 : std::isdigit(c) != 0;
                });
            if (valid && digits.size() <= 8) {
                append_utf8(out, std::stoul(digits, nullptr, hex ? 16 : 10));
                ok = true;
            }
        } else if (auto it = named_entities().find(std::string(ref)); it != named_entities().end()) {
            append_utf8(out, it->second);
            ok = true;
        }
        if (ok) {
            i = semi + 1;
        } else {
            out.push_back(s[i++]);
        }
    }
    return out;
}

bool same_content(const PageContent& a, const PageContent& b) {
    return a.canonical_url == b.canonical_url && a.title == b.title && a.body_text == b.body_text &&
           a.code_blocks == b.code_blocks;
}

PageContent extract_content(std::string_view html, const std::string& url) {
    PageContent page;
    page.canonical_url = url;

    std::string body, h1, block;
    std::optional<std::string> title;
    bool h1_open = false, h1_done = false;
    int capture_depth = 0;

    auto text_out = [&](std::string_view t) {
        body.append(t);
        if (capture_depth > 0) block.append(t);
        if (h1_open) h1.append(t);
    };

    std::size_t i = 0;
    while (i < html.size()) {
        if (html[i] != '<') {
            const auto next = html.find('<', i);
            const auto end = next == std::string_view::npos ? html.size() : next;
            text_out(html.substr(i, end - i));
            i = end;
            continue;
        }
        if (html.substr(i, 4) == "<!--") {
            const auto close = html.find("-->", i + 4);
            i = close == std::string_view::npos ? html.size() : close + 3;
            continue;
        }
        if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
            const auto close = html.find('>', i);
            i = close == std::string_view::npos ? html.size() : close + 1;
            continue;
        }
        const auto tag = parse_tag(html, i);
        if (!tag) {
            text_out(html.substr(i, 1));
            ++i;
            continue;
        }
        i = tag->end;
        const auto& name = tag->name;

        if (!tag->closing && !tag->self_closing && (name == "script" || name == "style" || name == "title")) {
            auto [content, after] = raw_text(html, i, name);
            if (name == "title" && !title) title = text::collapse_whitespace(decode_entities(content));
            i = after;
            body.push_back(' ');
            continue;
        }

        if (is_capture_tag(name)) {
            if (!tag->closing && !tag->self_closing) {
                if (capture_depth++ == 0) block.clear();
            } else if (tag->closing && capture_depth > 0 && --capture_depth == 0) {
                if (auto b = finish_block(block); !b.empty()) page.code_blocks.push_back(std::move(b));
                block.clear();
            }
        } else if (capture_depth > 0 && is_block_tag(name)) {
            block.push_back('\n');
        }

        if (name == "h1") {
            if (!tag->closing && !h1_done) {
                h1_open = true;
            } else if (tag->closing && h1_open) {
                h1_open = false;
                h1_done = true;
            }
        }
        body.push_back(' ');
    }
    if (capture_depth > 0)
        if (auto b = finish_block(block); !b.empty()) page.code_blocks.push_back(std::move(b));

    page.body_text = text::collapse_whitespace(decode_entities(body));
    if (title && !title->empty())
        page.title = *title;
    else
        page.title = text::collapse_whitespace(decode_entities(h1));
    return page;
}

nlohmann::json to_json(const PageContent& page) {
    return {{"canonical_url", page.canonical_url},
            {"title", page.title},
            {"body_text", page.body_text},
            {"code_blocks", page.code_blocks},
            {"fetched_at", std::chrono::duration_cast<std::chrono::seconds>(page.fetched_at.time_since_epoch()).count()}};
}

PageContent page_from_json(const nlohmann::json& j) {
    PageContent page;
    page.canonical_url = j.at("canonical_url").get<std::string>();
    page.title = j.value("title", std::string());
    page.body_text = j.value("body_text", std::string());
    page.code_blocks = j.value("code_blocks", std::vector<std::string>{});
    page.fetched_at = std::chrono::system_clock::time_point(std::chrono::seconds(j.value("fetched_at", 0LL)));
    return page;
}

PageCache::PageCache(std::filesystem::path dir, std::chrono::seconds ttl, Clock clock)
    : dir_(std::move(dir)), ttl_(ttl), clock_(std::move(clock)) {}

std::filesystem::path PageCache::path_for(const std::string& canonical_url) const {
    const auto hash = text::sha256_hex(canonical_url);
    return dir_ / hash.substr(0, 2) / (hash + ".json");
}

std::optional<PageContent> PageCache::load(const std::string& canonical_url) const {
    std::ifstream in(path_for(canonical_url));
    if (!in) return std::nullopt;
    try {
        auto page = page_from_json(nlohmann::json::parse(in));
        if (page.canonical_url != canonical_url) return std::nullopt;  // hash collision
        if (clock_() - page.fetched_at >= ttl_) return std::nullopt;
        page.from_cache = true;
        return page;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

void PageCache::store(const PageContent& page) const {
    const auto path = path_for(page.canonical_url);
    std::filesystem::create_directories(path.parent_path());
    thread_local std::mt19937_64 rng{std::random_device{}()};
    auto tmp = path;
    tmp += ".tmp" + std::to_string(rng());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write cache file " + tmp.string());
        out << to_json(page).dump();
        if (!out.flush()) throw std::runtime_error("cannot write cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

PageContent fetch_page(const std::string& url, PageCache* cache, HttpTransport& transport,
                       const FetchOptions& options) {
    if (cache)
        if (auto hit = cache->load(url)) return *hit;

    std::string current = url;
    for (int hop = 0; hop <= options.max_redirects; ++hop) {
        HttpRequest request;
        request.url = current;
        request.timeout_ms = options.timeout_ms;
        request.max_body_bytes = options.max_body_bytes;
        HttpResponse response;
        try {
            response = transport.get(request);
        } catch (const Error& e) {
            throw FetchError(url, e.what());
        }
        if (response.status >= 300 && response.status < 400) {
            const auto location = response.header("location");
            if (location.empty()) throw FetchError(url, "redirect without location");
            current = resolve_url(current, location);
            continue;
        }
        if (response.status < 200 || response.status >= 300)
            throw FetchError(url, "HTTP " + std::to_string(response.status));

        const auto content_type = text::to_lower(response.header("content-type"));
        std::string body = std::move(response.body);
        if (content_type.find("iso-8859-1") != std::string::npos || content_type.find("latin1") != std::string::npos ||
            content_type.find("windows-1252") != std::string::npos)
            body = latin1_to_utf8(body);

        auto page = extract_content(body, url);
        page.fetched_at = cache ? cache->now() : std::chrono::system_clock::now();
        if (cache) cache->store(page);
        return page;
    }
    throw FetchError(url, "more than " + std::to_string(options.max_redirects) + " redirects");
}

PageFetcher::PageFetcher(std::shared_ptr<HttpTransport> transport, std::shared_ptr<PageCache> cache,
                         FetchOptions options)
    : transport_(std::move(transport)), cache_(std::move(cache)), options_(options) {}

PageContent PageFetcher::fetch(const std::string& url) {
    return fetch_page(url, cache_.get(), *transport_, options_);
}

std::map<std::string, PageContent> PageFetcher::fetch_all(const std::vector<std::string>& urls,
                                                          std::vector<std::string>* failures) {
    const std::size_t n = urls.size();
    std::vector<std::optional<PageContent>> pages(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        const std::size_t workers = std::max<std::size_t>(1, std::min(options_.max_parallel, n));
        for (std::size_t w = 0; w < workers && n > 0; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next++) < n;) {
                    try {
                        pages[i] = fetch(urls[i]);
                    } catch (const std::exception& e) {
                        errors[i] = e.what();
                    }
                }
            });
    }
    std::map<std::string, PageContent> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (pages[i])
            out.emplace(urls[i], std::move(*pages[i]));
        else if (failures)
            failures->push_back(errors[i]);
    }
    return out;
}

}  // namespace surf
