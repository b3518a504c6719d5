#include <algorithm>
#include <vector>

#include "doctest.h"
#include "flexqa/term.hpp"

using namespace flexqa;

TEST_CASE("serialize round-trips through parse_term") {
    std::vector<Term> terms = {
        Term::entity("m.04lg6"),
        Term::entity("e:davinci"),
        Term::literal("Leonardo da Vinci", Datatype::String),
        Term::literal("9", Datatype::Integer),
        Term::literal("530", Datatype::Double),
        Term::literal("1452", Datatype::Date),
        Term::literal("festina lente", Datatype::String),
    };
    for (const auto& t : terms) {
        auto back = parse_term(t.serialize());
        REQUIRE(back.has_value());
        CHECK(*back == t);
        CHECK(back->serialize() == t.serialize());
    }
    // Classes share the entity spelling; the hint restores the kind.
    auto cls = Term::cls("visual_art.visual_artist");
    auto back = parse_term(cls.serialize(), /*class_hint=*/true);
    REQUIRE(back.has_value());
    CHECK(*back == cls);
}

TEST_CASE("datatype suffixes accept short, xsd:, and URI forms") {
    CHECK(datatype_from_suffix("integer") == Datatype::Integer);
    CHECK(datatype_from_suffix("xsd:integer") == Datatype::Integer);
    CHECK(datatype_from_suffix("http://www.w3.org/2001/XMLSchema#integer") == Datatype::Integer);
    CHECK(datatype_from_suffix("double") == Datatype::Double);
    CHECK(datatype_from_suffix("xsd:double") == Datatype::Double);
    // float is treated as double
    CHECK(datatype_from_suffix("float") == Datatype::Double);
    CHECK(datatype_from_suffix("http://www.w3.org/2001/XMLSchema#float") == Datatype::Double);
    CHECK(datatype_from_suffix("date") == Datatype::Date);
    CHECK(datatype_from_suffix("string") == Datatype::String);
    CHECK_FALSE(datatype_from_suffix("quantity").has_value());
    CHECK_FALSE(datatype_from_suffix("").has_value());
}

TEST_CASE("literal_valid checks the lexical form against the datatype") {
    CHECK(literal_valid({"9", Datatype::Integer}));
    CHECK(literal_valid({"-42", Datatype::Integer}));
    CHECK_FALSE(literal_valid({"9.5", Datatype::Integer}));
    CHECK_FALSE(literal_valid({"nine", Datatype::Integer}));
    CHECK(literal_valid({"530", Datatype::Double}));
    CHECK(literal_valid({"7.0", Datatype::Double}));
    CHECK_FALSE(literal_valid({"", Datatype::Double}));
    CHECK(literal_valid({"1452", Datatype::Date}));
    CHECK(literal_valid({"1928-08-06", Datatype::Date}));
    CHECK_FALSE(literal_valid({"08/06/1928", Datatype::Date}));
    CHECK(literal_valid({"anything at all", Datatype::String}));
}

TEST_CASE("numeric() is defined exactly for integer and double literals") {
    CHECK(Term::literal("9", Datatype::Integer).numeric() == 9.0);
    CHECK(Term::literal("7.5", Datatype::Double).numeric() == 7.5);
    CHECK_FALSE(Term::literal("9", Datatype::String).numeric().has_value());
    CHECK_FALSE(Term::literal("1452", Datatype::Date).numeric().has_value());
    CHECK_FALSE(Term::entity("m.04lg6").numeric().has_value());
}

TEST_CASE("entity and class with the same spelling are distinct terms") {
    auto e = Term::entity("food.food");
    auto c = Term::cls("food.food");
    CHECK_FALSE(e == c);
    CHECK(e.key() != c.key());
}

TEST_CASE("compare matches the ordering of the key strings") {
    // key() is the documented order; compare() must agree on every pair.
    std::vector<Term> terms = {
        Term::entity("a"),
        Term::entity("m.04lg6"),
        Term::cls("a"),
        Term::cls("zz"),
        Term::literal("a", Datatype::String),
        Term::literal("a", Datatype::Integer),
        Term::literal("9", Datatype::Integer),
        Term::literal("9", Datatype::Double),
        Term::literal("10", Datatype::Integer),
        Term::literal("1452", Datatype::Date),
        Term::literal("", Datatype::String),
    };
    for (const auto& a : terms) {
        for (const auto& b : terms) {
            int via_key = a.key().compare(b.key());
            int via_cmp = a.compare(b);
            CHECK(((via_key < 0) == (via_cmp < 0)));
            CHECK(((via_key > 0) == (via_cmp > 0)));
            CHECK(((via_key == 0) == (via_cmp == 0)));
        }
    }
    // Sorting by operator< equals sorting by key().
    auto by_cmp = terms;
    std::sort(by_cmp.begin(), by_cmp.end());
    auto by_key = terms;
    std::sort(by_key.begin(), by_key.end(),
              [](const Term& x, const Term& y) { return x.key() < y.key(); });
    CHECK(by_cmp == by_key);
}

TEST_CASE("parse_term rejects malformed literals") {
    CHECK_FALSE(parse_term("\"unterminated").has_value());
    CHECK_FALSE(parse_term("\"9\"^^quantity").has_value());
    CHECK_FALSE(parse_term("\"nine\"^^integer").has_value());
    CHECK_FALSE(parse_term("").has_value());
}
