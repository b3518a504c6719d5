#include <optional>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "flexqa/errors.hpp"
#include "flexqa/execute.hpp"
#include "flexqa/kb.hpp"

using namespace flexqa;

// ---------------------------------------------------------------------------
// Independent brute-force interpreter. No indexes, no shared code with the
// executor: every operator is a linear scan over kb.triples(). The executor
// (and the sexpr->sparql conversion) are checked against this.

namespace {

struct OracleTypeError {};

bool oracle_comparable(const Term& t) {
    return t.is_literal() && t.lit.dt != Datatype::String;
}

// number line for integers/doubles, ISO text for dates; mixing is an error
int oracle_compare(const Term& a, const Term& b) {
    if (!oracle_comparable(a) || !oracle_comparable(b)) throw OracleTypeError{};
    bool a_date = a.lit.dt == Datatype::Date;
    bool b_date = b.lit.dt == Datatype::Date;
    if (a_date != b_date) throw OracleTypeError{};
    if (a_date) return a.lit.lexical.compare(b.lit.lexical);
    double x = *a.numeric(), y = *b.numeric();
    if (x < y) return -1;
    return x > y ? 1 : 0;
}

std::set<Term> oracle_eval(const SexprPtr& node, const KnowledgeBase& kb) {
    std::set<Term> out;
    switch (node->kind) {
        case SexprNode::Kind::Entity:
            out.insert(Term::entity(node->symbol));
            break;
        case SexprNode::Kind::Class:
            for (const auto& t : kb.triples())
                if (t.predicate == kTypePredicate && t.object == Term::cls(node->symbol))
                    out.insert(Term::entity(t.subject));
            break;
        case SexprNode::Kind::Join: {
            auto child = oracle_eval(node->child, kb);
            for (const auto& t : kb.triples()) {
                if (t.predicate != node->symbol) continue;
                if (node->reverse) {
                    if (child.count(Term::entity(t.subject)) || child.count(Term::cls(t.subject)))
                        out.insert(t.object);
                } else {
                    if (child.count(t.object)) out.insert(Term::entity(t.subject));
                }
            }
            break;
        }
        case SexprNode::Kind::And: {
            auto left = oracle_eval(node->child, kb);
            auto right = oracle_eval(node->right, kb);
            for (const auto& t : left)
                if (right.count(t)) out.insert(t);
            break;
        }
        case SexprNode::Kind::ArgMax:
        case SexprNode::Kind::ArgMin: {
            bool maximize = node->kind == SexprNode::Kind::ArgMax;
            auto source = oracle_eval(node->child, kb);
            std::vector<std::pair<Term, Term>> best_of;  // member -> best value
            for (const auto& x : source) {
                if (x.is_literal()) continue;
                std::optional<Term> best;
                for (const auto& t : kb.triples()) {
                    if (t.subject != x.id || t.predicate != node->symbol) continue;
                    if (!oracle_comparable(t.object)) throw OracleTypeError{};
                    if (!best || (maximize ? oracle_compare(t.object, *best) > 0
                                           : oracle_compare(t.object, *best) < 0))
                        best = t.object;
                }
                if (best) best_of.emplace_back(x, *best);
            }
            if (best_of.empty()) break;
            Term global = best_of.front().second;
            for (const auto& [x, v] : best_of)
                if (maximize ? oracle_compare(v, global) > 0 : oracle_compare(v, global) < 0)
                    global = v;
            for (const auto& [x, v] : best_of)
                if (oracle_compare(v, global) == 0) out.insert(x);
            break;
        }
        case SexprNode::Kind::Cmp: {
            Term rhs = Term::literal(node->literal.lexical, node->literal.dt);
            for (const auto& t : kb.triples()) {
                if (t.predicate != node->symbol) continue;
                int c = oracle_compare(t.object, rhs);
                bool keep = false;
                switch (node->op) {
                    case CmpOp::Lt: keep = c < 0; break;
                    case CmpOp::Le: keep = c <= 0; break;
                    case CmpOp::Gt: keep = c > 0; break;
                    case CmpOp::Ge: keep = c >= 0; break;
                    case CmpOp::Ne: keep = c != 0; break;
                }
                if (keep) out.insert(Term::entity(t.subject));
            }
            break;
        }
        case SexprNode::Kind::Count: {
            auto child = oracle_eval(node->child, kb);
            out.insert(Term::literal(std::to_string(child.size()), Datatype::Integer));
            break;
        }
    }
    return out;
}

// answers, or nullopt when the program is a type error
std::optional<std::set<Term>> oracle_run(const Program& p, const KnowledgeBase& kb) {
    try {
        return oracle_eval(p.sexpr, kb);
    } catch (const OracleTypeError&) {
        return std::nullopt;
    }
}

std::optional<std::set<Term>> exec_run(const Program& p, const KnowledgeBase& kb) {
    try {
        auto r = execute(p, kb);
        return std::set<Term>(r.answers.begin(), r.answers.end());
    } catch (const ExecutionError&) {
        return std::nullopt;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Fixture KBs. Three small domains with classes, multi-valued relations,
// numeric and date attributes, superlative ties, and deliberate type hazards.

static const char* kArtKb =
    "m.04lg6\tvisual_art.visual_artist.art_forms\te:painting\n"
    "m.04lg6\tvisual_art.visual_artist.art_forms\te:drawing\n"
    "m.04lg6\ttype.object.type\tc:artist\n"
    "m.0kc6\tvisual_art.visual_artist.art_forms\te:painting\n"
    "m.0kc6\ttype.object.type\tc:artist\n"
    "e:davinci\tr:art_forms\te:painting\n"
    "e:davinci\tr:profession\te:painter\n"
    "e:davinci\tr:born\t\"1452\"^^date\n"
    "e:davinci\tr:height\t\"1.74\"^^double\n"
    "e:davinci\ttype.object.type\tc:artist\n"
    "e:warhol\tr:art_forms\te:printmaking\n"
    "e:warhol\tr:profession\te:painter\n"
    "e:warhol\tr:born\t\"1928\"^^date\n"
    "e:warhol\tr:height\t\"1.80\"^^double\n"
    "e:warhol\ttype.object.type\tc:artist\n"
    "e:vasari\tr:profession\te:writer\n"
    "e:vasari\ttype.object.type\tc:artist\n"
    "@name\te:davinci\t\"Leonardo da Vinci\"\n"
    "@name\te:warhol\t\"Andy Warhol\"\n"
    "@name\te:painting\t\"painting\"\n";

static const char* kTownKb =
    "e:alba\ttype.object.type\tc:town\n"
    "e:alba\tr:population\t\"1000\"^^integer\n"
    "e:alba\tr:area\t\"530\"^^double\n"
    "e:brig\ttype.object.type\tc:town\n"
    "e:brig\tr:population\t\"2500\"^^integer\n"
    "e:brig\tr:area\t\"120.5\"^^double\n"
    "e:cori\ttype.object.type\tc:town\n"
    "e:cori\tr:population\t\"2500\"^^integer\n"
    "e:cori\tr:area\t\"530\"^^double\n"
    "e:alba\tr:twin\te:brig\n"
    "e:brig\tr:twin\te:cori\n"
    "e:hq\tr:located_in\te:alba\n"
    "e:hq\ttype.object.type\tc:building\n"
    "e:hq\tr:floors\t\"9\"^^integer\n"
    "e:annex\tr:located_in\te:alba\n"
    "e:annex\ttype.object.type\tc:building\n"
    "e:annex\tr:floors\t\"3\"^^integer\n";

static const char* kHazardKb =
    "e:b0\tr:author\te:w0\n"
    "e:b1\tr:author\te:w0\n"
    "e:b1\tr:genre\te:satire\n"
    "e:b0\ttype.object.type\tc:book\n"
    "e:b1\ttype.object.type\tc:book\n"
    "e:w0\ttype.object.type\tc:writer\n"
    "e:b0\tr:motto\t\"festina lente\"\n"
    "e:b0\tr:published\t\"1900-01-02\"^^date\n"
    "e:b1\tr:published\t\"1899-12-31\"^^date\n"
    "e:b0\tr:copies\t\"1000\"^^integer\n"
    "e:b1\tr:copies\t\"1000\"^^integer\n"
    "e:mixed\tr:oddity\t\"7\"^^integer\n"
    "e:mixed2\tr:oddity\t\"1900\"^^date\n";

// Every program here parses; those expected to be type errors on a given KB
// are asserted through the oracle-parity test rather than listed separately.
static const std::vector<std::string> kPrograms = {
    "(JOIN (R visual_art.visual_artist.art_forms) m.04lg6)",
    "(JOIN (R visual_art.visual_artist.art_forms) m.0kc6)",
    "(JOIN (R r:art_forms) e:davinci)",
    "(JOIN r:art_forms e:painting)",
    "(JOIN r:profession e:painter)",
    "(AND c:artist (JOIN r:profession e:painter))",
    "(AND c:artist (JOIN r:art_forms e:painting))",
    "(AND c:artist (JOIN (R r:art_forms) e:nosuch))",
    "(COUNT (JOIN (R r:art_forms) e:davinci))",
    "(COUNT (AND c:artist (JOIN r:profession e:painter)))",
    "(COUNT (JOIN r:art_forms e:nosuch))",
    "(ARGMAX c:artist r:height)",
    "(ARGMIN c:artist r:height)",
    "(ARGMIN c:artist r:born)",
    "(ARGMAX (JOIN r:profession e:painter) r:born)",
    "(ARGMAX c:town r:population)",
    "(ARGMIN c:town r:area)",
    "(ARGMAX c:building r:floors)",
    "(AND c:town (gt r:population 1000^^integer))",
    "(AND c:town (ge r:population 1000^^integer))",
    "(AND c:town (le r:area 530^^double))",
    "(AND c:town (lt r:area 530^^double))",
    "(AND c:building (lt r:floors 9^^integer))",
    "(JOIN r:located_in (AND c:town (gt r:population 1500^^integer)))",
    "(JOIN (R r:twin) e:alba)",
    "(JOIN r:twin e:cori)",
    "(JOIN (R r:twin) (JOIN (R r:twin) e:alba))",
    "(JOIN (R r:author) e:b0)",
    "(JOIN r:author e:w0)",
    "(AND c:book (JOIN r:author e:w0))",
    "(JOIN (R r:genre) (JOIN r:author e:w0))",
    "(COUNT (AND c:book (JOIN r:author e:w0)))",
    "(AND c:book (lt r:published 1900-01-01^^date))",
    "(AND c:book (ge r:published 1900-01-01^^date))",
    "(ARGMAX c:book r:published)",
    "(ARGMIN c:book r:published)",
    "(ARGMAX c:book r:copies)",
    "(lt r:floors 9^^integer)",
    "(gt r:height 1.75^^double)",
    "(ge r:born 1900^^date)",
    // type hazards: string-valued and mixed-datatype relations
    "(lt r:motto 9^^integer)",
    "(ARGMAX c:book r:motto)",
    "(gt r:oddity 5^^integer)",
    "(JOIN (R r:nosuch) e:davinci)",
    "(COUNT c:artist)",
    "(AND c:writer c:book)",
    "(AND (JOIN r:author e:w0) (JOIN r:genre e:satire))",
};

TEST_CASE("executor and sparql conversion agree with the brute-force oracle") {
    const char* kbs[] = {kArtKb, kTownKb, kHazardKb};
    size_t checked = 0;
    for (const char* text : kbs) {
        auto kb = KnowledgeBase::from_string(text);
        for (const auto& src : kPrograms) {
            CAPTURE(src);
            auto program = parse_sexpr(src);
            auto want = oracle_run(program, kb);
            auto got = exec_run(program, kb);
            REQUIRE(want.has_value() == got.has_value());
            if (want) CHECK(*got == *want);

            Program converted = sexpr_to_sparql(program);
            REQUIRE(converted.lang == Lang::Sparql);
            auto via_sparql = exec_run(converted, kb);
            REQUIRE(via_sparql.has_value() == want.has_value());
            if (want) CHECK(*via_sparql == *want);
            ++checked;
        }
    }
    CHECK(checked == 3 * kPrograms.size());
}

TEST_CASE("the one-hop reverse join returns the artist's art forms") {
    auto kb = KnowledgeBase::from_string(kArtKb);
    auto r = execute(parse_sexpr("(JOIN (R r:art_forms) e:davinci)"), kb);
    REQUIRE(r.answers.size() == 1);
    CHECK(r.answers[0] == Term::entity("e:painting"));

    r = execute(parse_sexpr("(JOIN (R visual_art.visual_artist.art_forms) m.04lg6)"), kb);
    REQUIRE(r.answers.size() == 2);
    CHECK(r.answers[0] == Term::entity("e:drawing"));
    CHECK(r.answers[1] == Term::entity("e:painting"));
}

TEST_CASE("ASK answers true or false as a string literal") {
    auto kb = KnowledgeBase::from_string(kArtKb);
    auto yes = execute(parse_sparql("ASK { e:davinci r:art_forms e:painting . }"), kb);
    REQUIRE(yes.answers.size() == 1);
    CHECK(yes.answers[0] == Term::literal("true", Datatype::String));

    auto no = execute(parse_sparql("ASK { e:davinci r:art_forms e:printmaking . }"), kb);
    REQUIRE(no.answers.size() == 1);
    CHECK(no.answers[0] == Term::literal("false", Datatype::String));

    auto var = execute(parse_sparql("ASK { ?x r:art_forms e:painting . }"), kb);
    CHECK(var.answers[0] == Term::literal("true", Datatype::String));
}

TEST_CASE("COUNT answers a single integer literal") {
    auto kb = KnowledgeBase::from_string(kArtKb);
    auto r = execute(parse_sexpr("(COUNT (JOIN r:profession e:painter))"), kb);
    REQUIRE(r.answers.size() == 1);
    CHECK(r.answers[0] == Term::literal("2", Datatype::Integer));

    // counting an empty set still yields an answer
    r = execute(parse_sexpr("(COUNT (JOIN r:profession e:nosuch))"), kb);
    REQUIRE(r.answers.size() == 1);
    CHECK(r.answers[0] == Term::literal("0", Datatype::Integer));
}

TEST_CASE("comparing a string-valued relation is an execution error") {
    auto kb = KnowledgeBase::from_string(kHazardKb);
    CHECK_THROWS_AS(execute(parse_sexpr("(lt r:motto 9^^integer)"), kb), ExecutionError);
    CHECK_THROWS_AS(execute(parse_sexpr("(ARGMAX c:book r:motto)"), kb), ExecutionError);
    // mixed date/number domains cannot be ordered either
    CHECK_THROWS_AS(execute(parse_sexpr("(gt r:oddity 5^^integer)"), kb), ExecutionError);
}

TEST_CASE("superlatives keep the full tie set") {
    auto kb = KnowledgeBase::from_string(kTownKb);
    auto r = execute(parse_sexpr("(ARGMAX c:town r:population)"), kb);
    REQUIRE(r.answers.size() == 2);
    CHECK(r.answers[0] == Term::entity("e:brig"));
    CHECK(r.answers[1] == Term::entity("e:cori"));

    // same through the ORDER BY ... LIMIT 1 form
    auto s = execute(parse_sparql("SELECT ?x WHERE { ?x type.object.type c:town . "
                                  "?x r:population ?p . } ORDER BY DESC(?p) LIMIT 1"),
                     kb);
    CHECK(s.answers == r.answers);

    auto tied = execute(parse_sexpr("(ARGMAX c:book r:copies)"),
                        KnowledgeBase::from_string(kHazardKb));
    CHECK(tied.answers.size() == 2);
}

TEST_CASE("empty superlative source yields an empty answer set") {
    auto kb = KnowledgeBase::from_string(kTownKb);
    CHECK(execute(parse_sexpr("(ARGMAX c:nosuch r:population)"), kb).empty());
}

TEST_CASE("conversion forms match the source operator") {
    auto join = sexpr_to_sparql(parse_sexpr("(JOIN (R r:art_forms) e:davinci)"));
    CHECK(join.sparql->form == QueryForm::Select);
    REQUIRE(join.sparql->patterns.size() >= 1);

    auto count = sexpr_to_sparql(parse_sexpr("(COUNT (JOIN (R r:art_forms) e:davinci))"));
    CHECK(count.sparql->form == QueryForm::SelectCount);

    auto kb = KnowledgeBase::from_string(kArtKb);
    auto r = execute(count, kb);
    REQUIRE(r.answers.size() == 1);
    CHECK(r.answers[0] == Term::literal("1", Datatype::Integer));

    auto arg = sexpr_to_sparql(parse_sexpr("(ARGMAX c:town r:population)"));
    REQUIRE(arg.sparql->superlative.has_value());
    CHECK(arg.sparql->superlative->maximize);
}

TEST_CASE("COUNT and superlatives convert only at the root") {
    CHECK_THROWS_AS(sexpr_to_sparql(parse_sexpr("(JOIN (R r:a) (COUNT c:book))")),
                    UnsupportedConstructError);
    CHECK_THROWS_AS(
        sexpr_to_sparql(parse_sexpr("(JOIN (R r:a) (ARGMAX c:town r:population))")),
        UnsupportedConstructError);
    // COUNT directly over a superlative is also out
    CHECK_THROWS_AS(sexpr_to_sparql(parse_sexpr("(COUNT (ARGMAX c:town r:population))")),
                    UnsupportedConstructError);
}

TEST_CASE("empty-set propagation through AND") {
    auto kb = KnowledgeBase::from_string(kArtKb);
    auto converted = sexpr_to_sparql(parse_sexpr("(AND c:artist (JOIN (R r:art_forms) e:nosuch))"));
    CHECK(execute(converted, kb).empty());
    CHECK(execute(parse_sexpr("(AND c:artist (JOIN (R r:art_forms) e:nosuch))"), kb).empty());
}

TEST_CASE("unbound projected variable is an execution error") {
    auto kb = KnowledgeBase::from_string(kArtKb);
    CHECK_THROWS_AS(execute(parse_sparql("SELECT ?z WHERE { ?x r:art_forms ?y . }"), kb),
                    ExecutionError);
}

TEST_CASE("VALUES pins a variable to a constant") {
    auto kb = KnowledgeBase::from_string(kArtKb);
    auto r = execute(parse_sparql("SELECT ?x WHERE { ?x visual_art.visual_artist.art_forms ?y . "
                                  "VALUES ?y { e:painting } }"),
                     kb);
    std::set<Term> got(r.answers.begin(), r.answers.end());
    CHECK(got == std::set<Term>{Term::entity("m.04lg6"), Term::entity("m.0kc6")});
}

TEST_CASE("the neq filter removes self-pairs") {
    auto kb = KnowledgeBase::from_string(
        "e:a\tr:knows\te:a\n"
        "e:a\tr:knows\te:b\n");
    auto with = execute(parse_sparql("SELECT ?y WHERE { ?x r:knows ?y . "
                                     "VALUES ?x { e:a } FILTER ( ?x != ?y ) }"),
                        kb);
    REQUIRE(with.answers.size() == 1);
    CHECK(with.answers[0] == Term::entity("e:b"));
}

TEST_CASE("adding triples never removes filter-free select answers") {
    auto base = KnowledgeBase::from_string(kArtKb);
    auto grown = KnowledgeBase::from_string(std::string(kArtKb) +
                                            "e:vasari\tr:art_forms\te:painting\n"
                                            "e:new\tr:profession\te:painter\n"
                                            "e:new\ttype.object.type\tc:artist\n");
    const char* monotone[] = {
        "(JOIN r:art_forms e:painting)",
        "(JOIN r:profession e:painter)",
        "(AND c:artist (JOIN r:profession e:painter))",
        "(JOIN (R r:art_forms) e:davinci)",
        "(AND c:artist (JOIN r:art_forms e:painting))",
    };
    for (const char* src : monotone) {
        CAPTURE(src);
        auto before = execute(parse_sexpr(src), base);
        auto after = execute(parse_sexpr(src), grown);
        for (const auto& t : before.answers) {
            CHECK(std::find(after.answers.begin(), after.answers.end(), t) !=
                  after.answers.end());
        }
    }
}

TEST_CASE("execution answers are deduplicated and canonically ordered") {
    auto kb = KnowledgeBase::from_string(kArtKb);
    auto r = execute(parse_sexpr("(JOIN r:profession e:painter)"), kb);
    REQUIRE(r.answers.size() == 2);
    CHECK(r.answers[0].key() < r.answers[1].key());
    auto ser = r.serialized();
    CHECK(ser == std::vector<std::string>{"e:davinci", "e:warhol"});
}
