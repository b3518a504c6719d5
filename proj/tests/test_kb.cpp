#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "doctest.h"
#include "flexqa/errors.hpp"
#include "flexqa/kb.hpp"

using namespace flexqa;

// Oracle: a plain linear scan over the stored triples, no indexes. match()
// results are checked against this on every pattern the tests exercise.
static std::vector<Triple> scan_match(const KnowledgeBase& kb, const MatchPattern& p) {
    std::vector<Triple> out;
    for (const auto& t : kb.triples()) {
        if (p.subject && t.subject != *p.subject) continue;
        if (p.predicate && t.predicate != *p.predicate) continue;
        if (p.object && !(t.object == *p.object)) continue;
        out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

static const char* kThreeTripleKb =
    "e:davinci\tr:art_forms\te:painting\n"
    "e:davinci\ttype.object.type\tc:artist\n"
    "e:warhol\tr:art_forms\te:printmaking\n"
    "@name\te:davinci\t\"Leonardo da Vinci\"\n"
    "@name\te:warhol\t\"Andy Warhol\"\n";

TEST_CASE("empty file loads as an empty store") {
    auto kb = KnowledgeBase::from_string("");
    CHECK(kb.size() == 0);
    CHECK(kb.match({}).empty());
}

TEST_CASE("fact and name lines are counted by category") {
    auto kb = KnowledgeBase::from_string(
        "e:davinci\tr:art_forms\te:painting\n"
        "@name\te:davinci\t\"Leonardo da Vinci\"\n");
    CHECK(kb.size() == 1);  // the @name line is not a triple
    auto* ids = kb.entities_for_surface("leonardo da vinci");
    REQUIRE(ids != nullptr);
    CHECK(*ids == std::vector<std::string>{"e:davinci"});
    CHECK(kb.surface_name("e:davinci") == "Leonardo da Vinci");
}

TEST_CASE("wrong arity reports the offending line number") {
    try {
        KnowledgeBase::from_string(
            "e:a\tr:x\te:b\n"
            "e:only_two_fields\tr:x\n");
        FAIL("expected MalformedLineError");
    } catch (const MalformedLineError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("bad literals and bad ids are malformed lines") {
    CHECK_THROWS_AS(KnowledgeBase::from_string("e:a\tr:n\t\"nine\"^^integer\n"),
                    MalformedLineError);
    CHECK_THROWS_AS(KnowledgeBase::from_string("e:a\tr:x\t\"unterminated\n"),
                    MalformedLineError);
    CHECK_THROWS_AS(KnowledgeBase::from_string("\tr:x\te:b\n"), MalformedLineError);
    // the reserved type predicate requires a class object
    CHECK_THROWS_AS(KnowledgeBase::from_string("e:a\ttype.object.type\t\"artist\"\n"),
                    MalformedLineError);
}

TEST_CASE("comments and blank lines are ignored") {
    auto kb = KnowledgeBase::from_string(
        "# a comment\n"
        "\n"
        "e:a\tr:x\te:b\n"
        "# another\n");
    CHECK(kb.size() == 1);
}

TEST_CASE("match agrees with the linear-scan oracle on the 3-triple fixture") {
    auto kb = KnowledgeBase::from_string(kThreeTripleKb);
    REQUIRE(kb.size() == 3);

    std::vector<MatchPattern> patterns = {
        {"e:davinci", "r:art_forms", std::nullopt},
        {"e:davinci", std::nullopt, std::nullopt},
        {std::nullopt, "r:art_forms", std::nullopt},
        {std::nullopt, std::nullopt, Term::entity("e:painting")},
        {std::nullopt, std::nullopt, std::nullopt},
        {"e:unknown", std::nullopt, std::nullopt},
        {"e:davinci", "r:art_forms", Term::entity("e:painting")},
        {"e:warhol", "r:art_forms", Term::entity("e:painting")},
        {std::nullopt, "type.object.type", Term::cls("c:artist")},
    };
    for (const auto& p : patterns) {
        auto got = kb.match(p);
        auto want = scan_match(kb, p);
        CHECK(got == want);
        CHECK(kb.match_count_estimate(p) >= got.size());
    }

    auto hits = kb.match({"e:davinci", "r:art_forms", std::nullopt});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].object == Term::entity("e:painting"));
    CHECK(kb.match({std::nullopt, std::nullopt, std::nullopt}).size() == 3);
    CHECK(kb.match({"e:unknown", std::nullopt, std::nullopt}).empty());
}

TEST_CASE("every subsuming pattern finds a stored triple") {
    auto kb = KnowledgeBase::from_string(kThreeTripleKb);
    for (const auto& t : kb.triples()) {
        for (int mask = 0; mask < 8; ++mask) {
            MatchPattern p;
            if (mask & 1) p.subject = t.subject;
            if (mask & 2) p.predicate = t.predicate;
            if (mask & 4) p.object = t.object;
            auto res = kb.match(p);
            CHECK(std::find(res.begin(), res.end(), t) != res.end());
        }
        // fully specified: exactly one hit
        CHECK(kb.match({t.subject, t.predicate, t.object}).size() == 1);
    }
}

TEST_CASE("loading the same text twice yields equal stores") {
    auto a = KnowledgeBase::from_string(kThreeTripleKb);
    auto b = KnowledgeBase::from_string(kThreeTripleKb);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a.triples()[i] == b.triples()[i]);
}

TEST_CASE("duplicate triples collapse to one") {
    auto kb = KnowledgeBase::from_string(
        "e:a\tr:x\te:b\n"
        "e:a\tr:x\te:b\n");
    CHECK(kb.size() == 1);
}

TEST_CASE("surface_name returns the first declared name") {
    auto kb = KnowledgeBase::from_string(kThreeTripleKb);
    CHECK(kb.surface_name("e:davinci") == "Leonardo da Vinci");
    CHECK_FALSE(kb.surface_name("e:painting").has_value());
}

TEST_CASE("duplicate @name declarations: last wins, counted") {
    auto kb = KnowledgeBase::from_string(
        "e:a\tr:x\te:b\n"
        "@name\te:a\t\"First Name\"\n"
        "@name\te:a\t\"Second Name\"\n");
    CHECK(kb.surface_name("e:a") == "Second Name");
    CHECK(kb.duplicate_surface_count() == 1);
    CHECK(kb.entities_for_surface("first name") == nullptr);
    REQUIRE(kb.entities_for_surface("second name") != nullptr);
}

TEST_CASE("literal objects parse with their datatype suffixes") {
    auto kb = KnowledgeBase::from_string(
        "e:town\tr:area\t\"530\"^^double\n"
        "e:town\tr:post\t\"VLT\"\n"
        "e:b\tr:floors\t\"9\"^^integer\n");
    auto hits = kb.match({"e:town", "r:area", std::nullopt});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].object == Term::literal("530", Datatype::Double));
    hits = kb.match({"e:town", "r:post", std::nullopt});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].object == Term::literal("VLT", Datatype::String));
}

TEST_CASE("scan_surfaces takes the longest match, left to right") {
    auto kb = KnowledgeBase::from_string(
        "e:ny\tr:x\te:b\n"
        "e:york\tr:x\te:b\n"
        "@name\te:ny\t\"New York\"\n"
        "@name\te:york\t\"York\"\n");
    auto matches = kb.scan_surfaces("flights from new york tonight");
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].entity == "e:ny");
    CHECK(matches[0].surface == "new york");

    // the shorter name still matches on its own
    matches = kb.scan_surfaces("york is a city");
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].entity == "e:york");

    // non-overlapping scan finds both mentions
    matches = kb.scan_surfaces("from york to new york");
    REQUIRE(matches.size() == 2);
    CHECK(matches[0].entity == "e:york");
    CHECK(matches[1].entity == "e:ny");

    CHECK(kb.scan_surfaces("no names here").empty());
    CHECK(kb.max_surface_tokens() == 2);
}
