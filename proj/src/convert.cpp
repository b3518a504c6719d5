#include <string>

#include "flexqa/errors.hpp"
#include "flexqa/execute.hpp"

namespace flexqa {

namespace {

// Symbols in a template position may be variables ("?rel0"); they convert to
// SPARQL variables rather than constants.
TermOrVar symbol_operand(const std::string& symbol, bool as_class) {
    if (is_var_token(symbol)) return TermOrVar::variable(symbol.substr(1));
    return TermOrVar::constant(as_class ? Term::cls(symbol) : Term::entity(symbol));
}

class Converter {
public:
    SparqlQuery convert(const SexprPtr& root) {
        std::string x0 = fresh();
        if (root->kind == SexprNode::Kind::Count) {
            q_.form = QueryForm::SelectCount;
            q_.projected = x0;
            convert_set(root->child, x0);
            return std::move(q_);
        }
        if (root->kind == SexprNode::Kind::ArgMax || root->kind == SexprNode::Kind::ArgMin) {
            q_.form = QueryForm::Select;
            q_.projected = x0;
            convert_set(root->child, x0);
            std::string v = fresh();
            q_.patterns.push_back(
                {TermOrVar::variable(x0), symbol_operand(root->symbol, false),
                 TermOrVar::variable(v)});
            q_.superlative = Superlative{v, root->kind == SexprNode::Kind::ArgMax};
            return std::move(q_);
        }
        q_.form = QueryForm::Select;
        q_.projected = x0;
        convert_set(root, x0);
        return std::move(q_);
    }

private:
    SparqlQuery q_;
    int next_ = 0;

    std::string fresh() { return "x" + std::to_string(next_++); }

    // Emits constraints forcing ?target to range over the node's answer set.
    void convert_set(const SexprPtr& node, const std::string& target) {
        switch (node->kind) {
            case SexprNode::Kind::Entity:
                q_.values.push_back({target, symbol_operand(node->symbol, false)});
                return;
            case SexprNode::Kind::Class:
                q_.patterns.push_back({TermOrVar::variable(target),
                                       TermOrVar::constant(Term::entity(kTypePredicate)),
                                       symbol_operand(node->symbol, true)});
                return;
            case SexprNode::Kind::Join: {
                std::string child = fresh();
                convert_set(node->child, child);
                TermOrVar rel = symbol_operand(node->symbol, false);
                if (node->reverse) {
                    q_.patterns.push_back(
                        {TermOrVar::variable(child), rel, TermOrVar::variable(target)});
                } else {
                    q_.patterns.push_back(
                        {TermOrVar::variable(target), rel, TermOrVar::variable(child)});
                }
                return;
            }
            case SexprNode::Kind::And:
                convert_set(node->child, target);
                convert_set(node->right, target);
                return;
            case SexprNode::Kind::Cmp: {
                std::string v = fresh();
                q_.patterns.push_back({TermOrVar::variable(target),
                                       symbol_operand(node->symbol, false),
                                       TermOrVar::variable(v)});
                TermOrVar rhs =
                    node->value_var.empty()
                        ? TermOrVar::constant(
                              Term::literal(node->literal.lexical, node->literal.dt))
                        : TermOrVar::variable(node->value_var.substr(1));
                q_.filters.push_back(FilterCmp{v, node->op, rhs});
                return;
            }
            case SexprNode::Kind::ArgMax:
            case SexprNode::Kind::ArgMin:
            case SexprNode::Kind::Count:
                throw UnsupportedConstructError(
                    "COUNT/ARGMAX/ARGMIN encodable only at the query root");
        }
    }
};

}  // namespace

Program sexpr_to_sparql(const Program& program) {
    if (program.lang != Lang::Sexpr)
        throw UnsupportedConstructError("sexpr program expected");
    Converter c;
    return make_program(c.convert(program.sexpr));
}

}  // namespace flexqa
