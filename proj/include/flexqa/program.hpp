#pragma once
// Programs: the S-expression language and the SPARQL subset, with parsers and
// a canonical single-space serialization. Template variables (?entK, ?relK,
// ?valK) are ordinary '?'-prefixed symbols in either language, so templates
// are plain Programs.

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flexqa/term.hpp"

namespace flexqa {

enum class Lang { Sexpr, Sparql };

const char* lang_name(Lang lang);
std::optional<Lang> lang_from_name(const std::string& name);

enum class CmpOp { Lt, Le, Gt, Ge, Ne };

const char* cmp_op_symbol(CmpOp op);   // "<", "<=", ">", ">=", "!="
const char* cmp_op_keyword(CmpOp op);  // "lt", "le", "gt", "ge", "ne"

// ---------------------------------------------------------------------------
// S-expression AST

struct SexprNode;
using SexprPtr = std::shared_ptr<const SexprNode>;

struct SexprNode {
    enum class Kind { Entity, Class, Join, And, ArgMax, ArgMin, Cmp, Count };

    Kind kind = Kind::Entity;
    std::string symbol;     // Entity/Class: id; Join/Cmp/ArgMax/ArgMin: relation
    bool reverse = false;   // Join: relation was wrapped as (R rel)
    CmpOp op = CmpOp::Lt;   // Cmp
    Literal literal;        // Cmp right-hand side when value_var is empty
    std::string value_var;  // Cmp right-hand side as a template var ("?val0")
    SexprPtr child;         // Join child / And left / Arg* source / Count child
    SexprPtr right;         // And right
};

SexprPtr sexpr_entity(std::string id);
SexprPtr sexpr_class(std::string id);
SexprPtr sexpr_join(std::string relation, bool reverse, SexprPtr child);
SexprPtr sexpr_and(SexprPtr left, SexprPtr right);
SexprPtr sexpr_arg(bool maximize, SexprPtr source, std::string relation);
SexprPtr sexpr_cmp(CmpOp op, std::string relation, Literal rhs);
SexprPtr sexpr_cmp_var(CmpOp op, std::string relation, std::string value_var);
SexprPtr sexpr_count(SexprPtr child);

// ---------------------------------------------------------------------------
// SPARQL-subset AST

// A pattern slot or VALUES/filter operand: a constant term or a variable.
struct TermOrVar {
    bool is_var = false;
    std::string var;  // without '?'
    Term term;

    static TermOrVar variable(std::string name);
    static TermOrVar constant(Term t);

    bool operator==(const TermOrVar& other) const;
};

struct TriplePatternAst {
    TermOrVar subject, predicate, object;
};

struct ValuesBinding {
    std::string var;
    TermOrVar value;  // constant, or a variable in templates / step queries
};

struct FilterNeq {
    std::string a, b;  // both variables
};

struct FilterCmp {
    std::string var;
    CmpOp op;
    TermOrVar rhs;  // numeric/date literal, or a template value variable
};

using Filter = std::variant<FilterNeq, FilterCmp>;

// ORDER BY ASC|DESC(?v) LIMIT 1 — execution keeps the full tie set.
struct Superlative {
    std::string var;
    bool maximize = true;
};

enum class QueryForm { Select, SelectCount, Ask };

struct SparqlQuery {
    QueryForm form = QueryForm::Select;
    std::string projected;  // empty for ASK
    std::vector<TriplePatternAst> patterns;
    std::vector<ValuesBinding> values;
    std::vector<Filter> filters;
    std::optional<Superlative> superlative;
};

// ---------------------------------------------------------------------------
// Program

struct Program {
    Lang lang = Lang::Sexpr;
    SexprPtr sexpr;                        // when lang == Sexpr
    std::shared_ptr<const SparqlQuery> sparql;  // when lang == Sparql
    std::string canonical;                 // derived; parse(canonical) == ast

    bool operator==(const Program& other) const {
        return lang == other.lang && canonical == other.canonical;
    }
    bool operator<(const Program& other) const { return canonical < other.canonical; }
};

// Throws ParseError on unbalanced parens or unknown operator.
Program parse_sexpr(const std::string& text);

// Throws ParseError on anything outside the subset (OPTIONAL, UNION, ...).
Program parse_sparql(const std::string& text);

Program parse_program(const std::string& text, Lang lang);

std::string canonicalize(const SexprPtr& node);
std::string canonicalize(const SparqlQuery& query);
std::string canonicalize(const Program& program);

Program make_program(SexprPtr node);
Program make_program(SparqlQuery query);

// Relation ids referenced by a program (Join/Cmp/Arg relations or non-reserved
// pattern predicates), deduplicated in first-occurrence order. Variables are
// skipped.
std::vector<std::string> program_relations(const Program& program);

// Count of Join nodes (sexpr) / non-type patterns (sparql); Arg* adds one.
int program_hops(const Program& program);

bool is_var_token(const std::string& token);  // "?name"

}  // namespace flexqa
