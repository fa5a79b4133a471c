#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

// Lexical helpers shared by the trace tokenizer, the relevance metrics and the
// evaluation harness.
namespace surf::text {

std::string to_lower(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);
bool is_numeric(std::string_view s);

// Splits an identifier on '_' / '$' and on camelCase boundaries, keeping
// acronym runs together ("parseHTTPResponse" -> parse, HTTP, Response).
// Case is preserved.
std::vector<std::string> split_identifier(std::string_view identifier);

// Identifier-shaped words ([A-Za-z_$][A-Za-z0-9_$]*) in document order.
std::vector<std::string_view> identifier_words(std::string_view s);

// Lowercased terms for bag-of-words use. Every identifier-shaped word yields
// its full lowercased form and, when it is compound, each lowercased part.
// Terms shorter than `min_length` or purely numeric are dropped.
std::vector<std::string> terms(std::string_view s, std::size_t min_length = 3);

using TermCounts = std::map<std::string, double>;

TermCounts count_terms(const std::vector<std::string>& terms, double weight = 1.0);
void add_terms(TermCounts& into, const std::vector<std::string>& terms, double weight = 1.0);

// Cosine similarity of two sparse term-frequency vectors; 0 when either is empty.
double cosine(const TermCounts& a, const TermCounts& b);

std::string collapse_whitespace(std::string_view s);
std::string trim(std::string_view s);

// Hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace surf::text
