#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "flexqa/errors.hpp"
#include "flexqa/program.hpp"

using namespace flexqa;

TEST_CASE("parse_sexpr handles a one-hop reverse join") {
    auto p = parse_sexpr("(JOIN (R visual_art.visual_artist.art_forms) m.04lg6)");
    REQUIRE(p.lang == Lang::Sexpr);
    REQUIRE(p.sexpr != nullptr);
    CHECK(p.sexpr->kind == SexprNode::Kind::Join);
    CHECK(p.sexpr->symbol == "visual_art.visual_artist.art_forms");
    CHECK(p.sexpr->reverse);
    REQUIRE(p.sexpr->child != nullptr);
    CHECK(p.sexpr->child->kind == SexprNode::Kind::Entity);
    CHECK(p.sexpr->child->symbol == "m.04lg6");
}

TEST_CASE("parse_sexpr handles superlatives over a class") {
    auto p = parse_sexpr("(ARGMAX food.food food.food.energy)");
    REQUIRE(p.sexpr != nullptr);
    CHECK(p.sexpr->kind == SexprNode::Kind::ArgMax);
    CHECK(p.sexpr->symbol == "food.food.energy");
    REQUIRE(p.sexpr->child != nullptr);
    CHECK(p.sexpr->child->kind == SexprNode::Kind::Class);
    CHECK(p.sexpr->child->symbol == "food.food");
}

TEST_CASE("parse_sexpr rejects malformed input") {
    CHECK_THROWS_AS(parse_sexpr("(JOIN a"), ParseError);
    CHECK_THROWS_AS(parse_sexpr("(FROB x y)"), ParseError);
    CHECK_THROWS_AS(parse_sexpr("(JOIN r a) trailing"), ParseError);
    CHECK_THROWS_AS(parse_sexpr(""), ParseError);
    CHECK_THROWS_AS(parse_sexpr("(lt r:floors nine^^integer)"), ParseError);
    // comparatives take numeric or date literals, not strings
    CHECK_THROWS_AS(parse_sexpr("(lt r:floors \"nine\")"), ParseError);
}

TEST_CASE("comparative literals accept short and URI datatype suffixes") {
    auto a = parse_sexpr(
        "(AND architecture.building "
        "(lt architecture.building.floors 9^^http://www.w3.org/2001/XMLSchema#integer))");
    CHECK(a.canonical ==
          "(AND architecture.building (lt architecture.building.floors 9^^integer))");

    auto b = parse_sexpr(
        "(AND meteorology.beaufort_wind_force (ge meteorology.beaufort_wind_force.wave_height "
        "7.0^^http://www.w3.org/2001/XMLSchema#float))");
    CHECK(b.canonical ==
          "(AND meteorology.beaufort_wind_force "
          "(ge meteorology.beaufort_wind_force.wave_height 7.0^^double))");

    // the short form is already canonical
    CHECK(parse_sexpr(a.canonical).canonical == a.canonical);
}

TEST_CASE("parse_sparql handles the templated select-over-type query") {
    auto p = parse_sparql(
        "SELECT ( ?x0 AS ?value ) WHERE"
        " { ?x0 :type.object.type ?ent1 ."
        " VALUES ?x1 { ?ent0 }"
        " ?x0 ?rel0 ?x1 ."
        " FILTER ( ?x0 != ?x1 ) }");
    REQUIRE(p.lang == Lang::Sparql);
    REQUIRE(p.sparql != nullptr);
    const auto& q = *p.sparql;
    CHECK(q.form == QueryForm::Select);
    CHECK(q.projected == "x0");
    REQUIRE(q.patterns.size() == 2);
    CHECK(q.patterns[0].predicate.term.id == "type.object.type");
    REQUIRE(q.values.size() == 1);
    CHECK(q.values[0].var == "x1");
    CHECK(q.values[0].value.is_var);
    CHECK(q.values[0].value.var == "ent0");
    REQUIRE(q.filters.size() == 1);
    const auto* neq = std::get_if<FilterNeq>(&q.filters[0]);
    REQUIRE(neq != nullptr);
    CHECK(neq->a == "x0");
    CHECK(neq->b == "x1");
}

TEST_CASE("parse_sparql handles ASK and COUNT forms") {
    auto ask = parse_sparql("ASK { ?x r:art_forms e:painting . }");
    REQUIRE(ask.sparql != nullptr);
    CHECK(ask.sparql->form == QueryForm::Ask);
    CHECK(ask.sparql->patterns.size() == 1);

    auto count = parse_sparql(
        "SELECT (COUNT(DISTINCT ?e) AS ?count) WHERE "
        "{ ?e <pred:instance_of> ?c . ?e <area> ?v . FILTER ( ?v < \"530\"^^xsd:double ) . }");
    REQUIRE(count.sparql != nullptr);
    CHECK(count.sparql->form == QueryForm::SelectCount);
    CHECK(count.sparql->projected == "e");
    REQUIRE(count.sparql->filters.size() == 1);
    const auto& cmp = std::get<FilterCmp>(count.sparql->filters[0]);
    CHECK(cmp.op == CmpOp::Lt);
    CHECK(cmp.rhs.term == Term::literal("530", Datatype::Double));
    // xsd:double normalizes to the short suffix on canonicalization
    CHECK(count.canonical.find("\"530\"^^double") != std::string::npos);
}

TEST_CASE("parse_sparql handles the superlative form") {
    auto p = parse_sparql(
        "SELECT ?x WHERE { ?x r:height ?h . } ORDER BY DESC(?h) LIMIT 1");
    REQUIRE(p.sparql != nullptr);
    REQUIRE(p.sparql->superlative.has_value());
    CHECK(p.sparql->superlative->var == "h");
    CHECK(p.sparql->superlative->maximize);
    CHECK(p.canonical.find("ORDER BY DESC(?h) LIMIT 1") != std::string::npos);
}

TEST_CASE("parse_sparql rejects constructs outside the subset") {
    CHECK_THROWS_AS(parse_sparql("SELECT ?x WHERE { ?x OPTIONAL }"), ParseError);
    CHECK_THROWS_AS(parse_sparql("SELECT ?x WHERE { OPTIONAL { ?x r:y ?z . } }"), ParseError);
    CHECK_THROWS_AS(parse_sparql("SELECT ?x WHERE { ?x r:y ?z . } UNION { }"), ParseError);
    CHECK_THROWS_AS(parse_sparql("PREFIX r: <http://x> SELECT ?x WHERE { }"), ParseError);
    CHECK_THROWS_AS(parse_sparql("DESCRIBE ?x"), ParseError);
    CHECK_THROWS_AS(parse_sparql("SELECT ?x WHERE { ?x r:y ?z ."), ParseError);
}

TEST_CASE("ParseError carries position and expectation") {
    try {
        parse_sparql("SELECT ?x WHERE { ?x OPTIONAL }");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position > 0);
        CHECK_FALSE(e.expected.empty());
    }
}

TEST_CASE("canonicalize emits the exact single-space form") {
    auto p = parse_sexpr("( JOIN   (R visual_art.visual_artist.art_forms)\n  m.04lg6 )");
    CHECK(p.canonical == "(JOIN (R visual_art.visual_artist.art_forms) m.04lg6)");
}

TEST_CASE("differently spaced sources canonicalize identically") {
    auto a = parse_sparql("SELECT ?x WHERE { ?x r:art_forms e:painting . }");
    auto b = parse_sparql("SELECT   ?x\nWHERE {\n  ?x   r:art_forms\te:painting .\n}");
    CHECK(a.canonical == b.canonical);

    auto c = parse_sexpr("(COUNT (JOIN (R r:x) e:a))");
    auto d = parse_sexpr("  (COUNT(JOIN(R r:x)e:a))  ");
    CHECK(c.canonical == d.canonical);
}

// The corpus exercises every operator of both languages; reused below and by
// the acceptance round-trip gate.
static const std::vector<std::string> kSexprCorpus = {
    "(JOIN (R visual_art.visual_artist.art_forms) m.04lg6)",
    "(JOIN (R visual_art.visual_artist.art_forms) m.0kc6)",
    "(JOIN (R location.location.nearby_airports) m.0rp8x)",
    "(JOIN r:art_forms e:painting)",
    "(ARGMAX food.food food.food.energy)",
    "(ARGMIN food.bottled_water food.bottled_water.nitrate_content)",
    "(AND architecture.building (lt architecture.building.floors 9^^integer))",
    "(AND meteorology.beaufort_wind_force (ge meteorology.beaufort_wind_force.wave_height 7.0^^double))",
    "(AND c:artist (JOIN (R r:art_forms) e:nosuch))",
    "(COUNT (JOIN (R r:art_forms) e:davinci))",
    "(COUNT (AND c:artist (JOIN r:profession e:painter)))",
    "(JOIN (R r:b) (JOIN (R r:a) e:x))",
    "(JOIN r:b (JOIN r:a e:x))",
    "(AND c:book (JOIN (R r:author) (JOIN r:author e:b0)))",
    "(ARGMAX (JOIN (R r:works) e:x) r:copies)",
    "(ARGMIN (AND c:artist (JOIN r:profession e:painter)) r:born)",
    "(AND c:town (gt r:population 1000^^integer))",
    "(AND c:town (le r:area 530.5^^double))",
    "(AND c:person (lt r:born 1900^^date))",
    "(COUNT (AND c:building (lt r:floors 9^^integer)))",
};

static const std::vector<std::string> kSparqlCorpus = {
    "SELECT ?x WHERE { ?x r:art_forms e:painting . }",
    "SELECT DISTINCT ?x WHERE { e:davinci r:art_forms ?x . }",
    "SELECT ( ?x0 AS ?value ) WHERE { ?x0 type.object.type c:artist . ?x0 r:art_forms ?x1 . "
    "VALUES ?x1 { e:painting } FILTER ( ?x0 != ?x1 ) }",
    "SELECT (COUNT(DISTINCT ?e) AS ?count) WHERE { ?e <pred:instance_of> c:town . "
    "?e <area> ?v . FILTER ( ?v < \"530\"^^xsd:double ) . }",
    "SELECT (COUNT(DISTINCT ?e) AS ?count) WHERE { ?e r:population ?v . "
    "FILTER ( ?v != \"7600000000\"^^double ) . }",
    "ASK { ?x r:art_forms e:painting . }",
    "ASK { e:davinci r:art_forms e:sculpture . }",
    "SELECT ?x WHERE { ?x type.object.type c:town . ?x r:population ?p . } "
    "ORDER BY DESC(?p) LIMIT 1",
    "SELECT ?x WHERE { ?x r:height ?h . } ORDER BY ASC(?h) LIMIT 1",
    "SELECT ?x WHERE { ?x ?rel0 ?y . VALUES ?y { ?ent0 } }",
};

TEST_CASE("parse -> canonicalize -> parse is a fixpoint over the corpus") {
    size_t total = 0;
    for (const auto& text : kSexprCorpus) {
        auto p1 = parse_sexpr(text);
        auto p2 = parse_sexpr(p1.canonical);
        CHECK(p2.canonical == p1.canonical);
        ++total;
    }
    for (const auto& text : kSparqlCorpus) {
        auto p1 = parse_sparql(text);
        auto p2 = parse_sparql(p1.canonical);
        CHECK(p2.canonical == p1.canonical);
        ++total;
    }
    CHECK(total == kSexprCorpus.size() + kSparqlCorpus.size());
}

TEST_CASE("corpus canonical strings are pairwise distinct") {
    std::set<std::string> seen;
    for (const auto& text : kSexprCorpus) seen.insert(parse_sexpr(text).canonical);
    CHECK(seen.size() == kSexprCorpus.size());
}

TEST_CASE("program_relations lists relations in first-occurrence order") {
    auto p = parse_sexpr("(AND c:book (JOIN (R r:author) (JOIN r:author e:b0)))");
    CHECK(program_relations(p) == std::vector<std::string>{"r:author"});

    auto q = parse_sexpr("(ARGMIN (AND c:artist (JOIN r:profession e:painter)) r:born)");
    CHECK(program_relations(q) == std::vector<std::string>{"r:born", "r:profession"});

    auto s = parse_sparql(
        "SELECT ?x WHERE { ?x type.object.type c:town . ?x r:population ?p . }");
    // the reserved type predicate is not a relation
    CHECK(program_relations(s) == std::vector<std::string>{"r:population"});
}

TEST_CASE("program_hops counts joins") {
    CHECK(program_hops(parse_sexpr("(JOIN (R r:a) e:x)")) == 1);
    CHECK(program_hops(parse_sexpr("(JOIN (R r:b) (JOIN (R r:a) e:x))")) == 2);
    CHECK(program_hops(parse_sexpr("(COUNT (JOIN (R r:a) e:x))")) == 1);
    CHECK(program_hops(parse_sexpr("(ARGMAX food.food food.food.energy)")) == 1);
}

TEST_CASE("lang round-trips through its name") {
    CHECK(lang_from_name("sexpr") == Lang::Sexpr);
    CHECK(lang_from_name("sparql") == Lang::Sparql);
    CHECK(lang_from_name(lang_name(Lang::Sexpr)) == Lang::Sexpr);
    CHECK_FALSE(lang_from_name("prolog").has_value());
}
