#include "flexqa/program.hpp"

#include <algorithm>

#include "flexqa/kb.hpp"

namespace flexqa {

const char* lang_name(Lang lang) { return lang == Lang::Sexpr ? "sexpr" : "sparql"; }

std::optional<Lang> lang_from_name(const std::string& name) {
    if (name == "sexpr") return Lang::Sexpr;
    if (name == "sparql") return Lang::Sparql;
    return std::nullopt;
}

const char* cmp_op_symbol(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
        case CmpOp::Ne: return "!=";
    }
    return "<";
}

const char* cmp_op_keyword(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "lt";
        case CmpOp::Le: return "le";
        case CmpOp::Gt: return "gt";
        case CmpOp::Ge: return "ge";
        case CmpOp::Ne: return "ne";
    }
    return "lt";
}

SexprPtr sexpr_entity(std::string id) {
    auto n = std::make_shared<SexprNode>();
    n->kind = SexprNode::Kind::Entity;
    n->symbol = std::move(id);
    return n;
}

SexprPtr sexpr_class(std::string id) {
    auto n = std::make_shared<SexprNode>();
    n->kind = SexprNode::Kind::Class;
    n->symbol = std::move(id);
    return n;
}

SexprPtr sexpr_join(std::string relation, bool reverse, SexprPtr child) {
    auto n = std::make_shared<SexprNode>();
    n->kind = SexprNode::Kind::Join;
    n->symbol = std::move(relation);
    n->reverse = reverse;
    n->child = std::move(child);
    return n;
}

SexprPtr sexpr_and(SexprPtr left, SexprPtr right) {
    auto n = std::make_shared<SexprNode>();
    n->kind = SexprNode::Kind::And;
    n->child = std::move(left);
    n->right = std::move(right);
    return n;
}

SexprPtr sexpr_arg(bool maximize, SexprPtr source, std::string relation) {
    auto n = std::make_shared<SexprNode>();
    n->kind = maximize ? SexprNode::Kind::ArgMax : SexprNode::Kind::ArgMin;
    n->child = std::move(source);
    n->symbol = std::move(relation);
    return n;
}

SexprPtr sexpr_cmp(CmpOp op, std::string relation, Literal rhs) {
    auto n = std::make_shared<SexprNode>();
    n->kind = SexprNode::Kind::Cmp;
    n->op = op;
    n->symbol = std::move(relation);
    n->literal = std::move(rhs);
    return n;
}

SexprPtr sexpr_cmp_var(CmpOp op, std::string relation, std::string value_var) {
    auto n = std::make_shared<SexprNode>();
    n->kind = SexprNode::Kind::Cmp;
    n->op = op;
    n->symbol = std::move(relation);
    n->value_var = std::move(value_var);
    return n;
}

SexprPtr sexpr_count(SexprPtr child) {
    auto n = std::make_shared<SexprNode>();
    n->kind = SexprNode::Kind::Count;
    n->child = std::move(child);
    return n;
}

TermOrVar TermOrVar::variable(std::string name) {
    TermOrVar tv;
    tv.is_var = true;
    tv.var = std::move(name);
    return tv;
}

TermOrVar TermOrVar::constant(Term t) {
    TermOrVar tv;
    tv.is_var = false;
    tv.term = std::move(t);
    return tv;
}

bool TermOrVar::operator==(const TermOrVar& other) const {
    if (is_var != other.is_var) return false;
    return is_var ? var == other.var : term == other.term;
}

Program make_program(SexprPtr node) {
    Program p;
    p.lang = Lang::Sexpr;
    p.sexpr = std::move(node);
    p.canonical = canonicalize(p.sexpr);
    return p;
}

Program make_program(SparqlQuery query) {
    Program p;
    p.lang = Lang::Sparql;
    p.sparql = std::make_shared<const SparqlQuery>(std::move(query));
    p.canonical = canonicalize(*p.sparql);
    return p;
}

std::string canonicalize(const Program& program) { return program.canonical; }

Program parse_program(const std::string& text, Lang lang) {
    return lang == Lang::Sexpr ? parse_sexpr(text) : parse_sparql(text);
}

bool is_var_token(const std::string& token) {
    return token.size() > 1 && token[0] == '?';
}

namespace {

void collect_relations(const SexprPtr& node, std::vector<std::string>& out) {
    if (!node) return;
    switch (node->kind) {
        case SexprNode::Kind::Join:
        case SexprNode::Kind::Cmp:
        case SexprNode::Kind::ArgMax:
        case SexprNode::Kind::ArgMin:
            if (!is_var_token(node->symbol)) out.push_back(node->symbol);
            break;
        default:
            break;
    }
    collect_relations(node->child, out);
    collect_relations(node->right, out);
}

}  // namespace

std::vector<std::string> program_relations(const Program& program) {
    std::vector<std::string> raw;
    if (program.lang == Lang::Sexpr) {
        collect_relations(program.sexpr, raw);
    } else {
        for (const auto& p : program.sparql->patterns) {
            if (p.predicate.is_var) continue;
            const std::string& id = p.predicate.term.id;
            if (id != kTypePredicate) raw.push_back(id);
        }
    }
    std::vector<std::string> out;
    for (auto& r : raw)
        if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    return out;
}

namespace {

int sexpr_hops(const SexprPtr& node) {
    if (!node) return 0;
    int n = 0;
    if (node->kind == SexprNode::Kind::Join) n = 1;
    if (node->kind == SexprNode::Kind::ArgMax || node->kind == SexprNode::Kind::ArgMin) n = 1;
    return n + sexpr_hops(node->child) + sexpr_hops(node->right);
}

}  // namespace

int program_hops(const Program& program) {
    if (program.lang == Lang::Sexpr) return sexpr_hops(program.sexpr);
    int n = 0;
    for (const auto& p : program.sparql->patterns) {
        if (p.predicate.is_var || p.predicate.term.id != kTypePredicate) ++n;
    }
    if (program.sparql->superlative) ++n;
    return n;
}

}  // namespace flexqa
