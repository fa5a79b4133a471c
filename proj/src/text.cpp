#include "surf/text.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace surf::text {

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_lower_or_digit(char c) {
    return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c));
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
    if (prefix.size() > s.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    }
    return true;
}

bool is_numeric(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::vector<std::string> split_identifier(std::string_view identifier) {
    std::vector<std::string> parts;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) parts.push_back(std::move(current));
        current.clear();
    };
    for (std::size_t i = 0; i < identifier.size(); ++i) {
        const char c = identifier[i];
        if (c == '_' || c == '$') {
            flush();
            continue;
        }
        if (is_upper(c) && !current.empty()) {
            const char prev = current.back();
            const bool next_lower = i + 1 < identifier.size() &&
                                    std::islower(static_cast<unsigned char>(identifier[i + 1]));
            // fooBar -> foo|Bar ; HTTPResponse -> HTTP|Response
            if (is_lower_or_digit(prev) || (is_upper(prev) && next_lower)) flush();
        }
        current.push_back(c);
    }
    flush();
    return parts;
}

std::vector<std::string_view> identifier_words(std::string_view s) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < s.size()) {
        if (is_ident_start(s[i]) && (i == 0 || !is_ident_char(s[i - 1]))) {
            std::size_t j = i + 1;
            while (j < s.size() && is_ident_char(s[j])) ++j;
            words.push_back(s.substr(i, j - i));
            i = j;
        } else {
            ++i;
        }
    }
    return words;
}

std::vector<std::string> terms(std::string_view s, std::size_t min_length) {
    std::vector<std::string> out;
    auto keep = [&](const std::string& t) { return t.size() >= min_length && !is_numeric(t); };
    for (auto word : identifier_words(s)) {
        std::string full = to_lower(word);
        if (keep(full)) out.push_back(full);
        auto parts = split_identifier(word);
        if (parts.size() > 1) {
            for (auto& p : parts) {
                std::string lp = to_lower(p);
                if (keep(lp)) out.push_back(std::move(lp));
            }
        }
    }
    return out;
}

TermCounts count_terms(const std::vector<std::string>& terms, double weight) {
    TermCounts counts;
    add_terms(counts, terms, weight);
    return counts;
}

void add_terms(TermCounts& into, const std::vector<std::string>& terms, double weight) {
    for (const auto& t : terms) into[t] += weight;
}

double cosine(const TermCounts& a, const TermCounts& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [term, w] : a) {
        na += w * w;
        if (auto it = b.find(term); it != b.end()) dot += w * it->second;
    }
    for (const auto& [term, w] : b) nb += w * w;
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

std::string trim(std::string_view s) {
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
}

}  // namespace surf::text
