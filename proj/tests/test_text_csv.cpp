#include <doctest.h>

#include "skeetrl/csv.hpp"
#include "skeetrl/text.hpp"

using namespace skeetrl;

TEST_CASE("utf8_scalars decodes multibyte sequences") {
    const auto s = utf8_scalars("h\xC3\xA9llo");
    REQUIRE(s.size() == 5);
    CHECK(s[0] == U'h');
    CHECK(s[1] == char32_t(0xE9));

    const auto rocket = utf8_scalars("\xF0\x9F\x9A\x80");
    REQUIRE(rocket.size() == 1);
    CHECK(rocket[0] == char32_t(0x1F680));
}

TEST_CASE("utf8_scalars maps broken bytes to the replacement scalar") {
    const auto s = utf8_scalars("a\xFF");
    REQUIRE(s.size() == 2);
    CHECK(s[1] == char32_t(0xFFFD));

    // Truncated 3-byte lead: one replacement per bad byte, no crash.
    const auto t = utf8_scalars("\xE2\x82");
    CHECK(t.size() == 2);
}

TEST_CASE("utf8_offsets covers the string plus a terminal sentinel") {
    const auto offs = utf8_offsets("a\xC3\xA9z");
    REQUIRE(offs.size() == 4);
    CHECK(offs[0] == 0);
    CHECK(offs[1] == 1);
    CHECK(offs[2] == 3);
    CHECK(offs[3] == 4);
}

TEST_CASE("ascii_lower leaves non-ASCII bytes alone") {
    CHECK(ascii_lower("MiXeD 42") == "mixed 42");
    CHECK(ascii_lower("H\xC3\x89") == "h\xC3\x89");
}

TEST_CASE("whitespace_tokens splits on runs of whitespace") {
    const auto t = whitespace_tokens("  a\tb\n\nc  ");
    REQUIRE(t.size() == 3);
    CHECK(t[0] == "a");
    CHECK(t[1] == "b");
    CHECK(t[2] == "c");
    CHECK(whitespace_tokens("   ").empty());
}

TEST_CASE("strip_urls removes the link but keeps surrounding whitespace") {
    CHECK(strip_urls("see https://x.example/a b") == "see  b");
    CHECK(strip_urls("http://only.example/path") == "");
    CHECK(strip_urls("no links here") == "no links here");
    CHECK(strip_urls("tail https://x.example") == "tail ");
}

TEST_CASE("contains_ci is case-insensitive over ASCII") {
    CHECK(contains_ci("Hello World", "LO WO"));
    CHECK_FALSE(contains_ci("Hello", "hold"));
    CHECK(contains_ci("anything", ""));
}

TEST_CASE("hash64 separates seeds and is stable") {
    CHECK(hash64("abc", 1) == hash64("abc", 1));
    CHECK(hash64("abc", 1) != hash64("abc", 2));
    CHECK(hash64("abc", 1) != hash64("abd", 1));
}

TEST_CASE("truncate_words cuts at a word boundary and flags it") {
    bool t = false;
    CHECK(truncate_words("alpha beta gamma", 10, &t) == "alpha");
    CHECK(t);
    CHECK(truncate_words("short", 10, &t) == "short");
    CHECK_FALSE(t);
    // No whitespace inside the cap: hard cut at the scalar limit.
    CHECK(truncate_words("abcdefghij", 4, &t) == "abcd");
    CHECK(t);
}

TEST_CASE("parse_csv handles quotes, escapes, CRLF and multiline fields") {
    const CsvTable t = parse_csv("a,b\r\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n3,\"line\nbreak\"");
    REQUIRE(t.header.size() == 2);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0][1] == "x,y");
    CHECK(t.rows[1][1] == "say \"hi\"");
    CHECK(t.rows[2][1] == "line\nbreak");
}

TEST_CASE("parse_csv keeps empty fields and rejects empty input") {
    const CsvTable t = parse_csv("a,b,c\n1,,3\n");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][1] == "");
    CHECK_THROWS(parse_csv(""));
}

TEST_CASE("read_csv throws on a missing file") {
    CHECK_THROWS(read_csv("/nonexistent/skeetrl-test.csv"));
}
