#include "doctest.h"
#include "flexqa/text.hpp"

using namespace flexqa;

TEST_CASE("normalize_text lowercases, strips punctuation, collapses whitespace") {
    CHECK(normalize_text("Leonardo da Vinci") == "leonardo da vinci");
    CHECK(normalize_text("  What   type of art? ") == "what type of art");
    CHECK(normalize_text("He practiced painting.") == "he practiced painting");
    CHECK(normalize_text("don't-stop") == "don t stop");
    CHECK(normalize_text("") == "");
    CHECK(normalize_text("?!.,") == "");
}

TEST_CASE("normalize_text is idempotent") {
    const char* samples[] = {"A. B, c!", "x  y", "MiXeD CaSe", "already normal"};
    for (const auto* s : samples) {
        auto once = normalize_text(s);
        CHECK(normalize_text(once) == once);
    }
}

TEST_CASE("tokenize splits normalized text on spaces") {
    auto toks = tokenize("What type of art Leonardo da Vinci do?");
    REQUIRE(toks.size() == 8);
    CHECK(toks[0] == "what");
    CHECK(toks[7] == "do");
    CHECK(tokenize("").empty());
    CHECK(tokenize("  ?!  ").empty());
}

TEST_CASE("join is the inverse of a single-space split") {
    std::vector<std::string> parts = {"a", "b", "c"};
    CHECK(join(parts, " ") == "a b c");
    CHECK(join(parts, ", ") == "a, b, c");
    CHECK(join({}, " ") == "");
    CHECK(join({"only"}, " ") == "only");
}

TEST_CASE("verbalize_id drops the domain prefix and splits segments") {
    CHECK(verbalize_id("visual_art.visual_artist.art_forms") == "visual artist art forms");
    CHECK(verbalize_id("r:art_forms") == "art forms");
    CHECK(verbalize_id("location.location.nearby_airports") == "location nearby airports");
    // single segment: nothing to drop
    CHECK(verbalize_id("art_forms") == "art forms");
    CHECK(verbalize_id("population") == "population");
}

TEST_CASE("fnv1a64 matches the published reference vectors") {
    // Offset basis and two classic FNV-1a test strings.
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("fnv1a64 is stable across calls and sensitive to input") {
    CHECK(fnv1a64("abc") == fnv1a64("abc"));
    CHECK(fnv1a64("abc") != fnv1a64("acb"));
}

TEST_CASE("id_valid rejects whitespace and empty ids") {
    CHECK(id_valid("m.04lg6"));
    CHECK(id_valid("visual_art.visual_artist.art_forms"));
    CHECK_FALSE(id_valid(""));
    CHECK_FALSE(id_valid("two words"));
    CHECK_FALSE(id_valid("tab\tid"));
}
