#include <doctest.h>

#include <cmath>

#include "surf/text.hpp"

using namespace surf;

TEST_CASE("split_identifier keeps acronyms together") {
    CHECK(text::split_identifier("parseHTTPResponse") == std::vector<std::string>{"parse", "HTTP", "Response"});
    CHECK(text::split_identifier("checkForComodification") ==
          std::vector<std::string>{"check", "For", "Comodification"});
    CHECK(text::split_identifier("ArrayList$Itr") == std::vector<std::string>{"Array", "List", "Itr"});
    CHECK(text::split_identifier("MAX_VALUE") == std::vector<std::string>{"MAX", "VALUE"});
    CHECK(text::split_identifier("x").size() == 1);
}

TEST_CASE("terms adds parts of compound words and drops short or numeric ones") {
    const auto t = text::terms("myList.add(42); ArrayList");
    CHECK(t == std::vector<std::string>{"mylist", "list", "add", "arraylist", "array", "list"});
    CHECK(text::terms("a1 12345 ab").empty());
}

TEST_CASE("cosine") {
    const auto a = text::count_terms({"x1x", "y2y"});
    CHECK(text::cosine(a, a) == doctest::Approx(1.0));
    CHECK(text::cosine(a, text::count_terms({"zzz"})) == 0.0);
    CHECK(text::cosine(a, {}) == 0.0);
    CHECK(text::cosine(a, text::count_terms({"x1x"})) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("sha256") {
    CHECK(text::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("whitespace helpers") {
    CHECK(text::collapse_whitespace("  a \n\t b  ") == "a b");
    CHECK(text::trim("\t x y \n") == "x y");
    CHECK(text::is_numeric("0123"));
    CHECK_FALSE(text::is_numeric("12a"));
    CHECK_FALSE(text::is_numeric(""));
}
