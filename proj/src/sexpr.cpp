#include <cctype>
#include <memory>
#include <string>

#include "flexqa/errors.hpp"
#include "flexqa/program.hpp"

namespace flexqa {

namespace {

bool is_operator_head(const std::string& word) {
    return word == "JOIN" || word == "AND" || word == "R" || word == "ARGMAX" ||
           word == "ARGMIN" || word == "COUNT" || word == "lt" || word == "le" ||
           word == "gt" || word == "ge";
}

class SexprParser {
public:
    explicit SexprParser(const std::string& text) : text_(text) {}

    SexprPtr parse() {
        auto node = parse_operand(true);
        skip_ws();
        if (pos_ != text_.size()) throw ParseError(pos_, "end of input");
        return node;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    // Word starting at `at`, for deciding whether a '(' opens an operator node.
    std::string word_after_paren(size_t at) const {
        size_t i = at + 1;
        while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
        size_t start = i;
        while (i < text_.size() && !std::isspace(static_cast<unsigned char>(text_[i])) &&
               text_[i] != '(' && text_[i] != ')')
            ++i;
        return text_.substr(start, i - start);
    }

    std::string take_token(const char* what) {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')')
            ++pos_;
        if (pos_ == start) throw ParseError(pos_, what);
        return text_.substr(start, pos_ - start);
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) throw ParseError(pos_, std::string("'") + c + "'");
        ++pos_;
    }

    // Leaf text runs to the enclosing ')'. Parenthesized groups whose head is
    // not an operator belong to the name ("Roseville, Michigan").
    SexprPtr parse_leaf(bool as_class) {
        skip_ws();
        std::string out;
        int depth = 0;
        size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '(') {
                if (depth == 0 && is_operator_head(word_after_paren(pos_)))
                    throw ParseError(pos_, "entity name without subexpression");
                ++depth;
            } else if (c == ')') {
                if (depth == 0) break;
                --depth;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!out.empty() && out.back() != ' ') out.push_back(' ');
            } else {
                out.push_back(c);
            }
            ++pos_;
        }
        if (depth != 0) throw ParseError(text_.size(), "')'");
        while (!out.empty() && out.back() == ' ') out.pop_back();
        if (out.empty()) throw ParseError(start, "entity name");
        return as_class ? sexpr_class(out) : sexpr_entity(out);
    }

    // Operand in tail position: a node if '(' opens an operator, else a leaf.
    SexprPtr parse_operand(bool at_root) {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError(pos_, "expression");
        if (peek() == '(' && is_operator_head(word_after_paren(pos_))) return parse_node();
        if (at_root && peek() == '(')
            throw ParseError(pos_, "operator after '('");
        return parse_leaf(false);
    }

    // First argument of AND / ARGMAX / ARGMIN: bare token means a class.
    SexprPtr parse_set_or_class() {
        skip_ws();
        if (peek() == '(') {
            if (!is_operator_head(word_after_paren(pos_)))
                throw ParseError(pos_, "operator after '('");
            return parse_node();
        }
        return sexpr_class(take_token("class id"));
    }

    Literal parse_cmp_literal() {
        std::string token = take_token("typed literal");
        std::string lex;
        std::string suffix;
        if (!token.empty() && token.front() == '"') {
            size_t close = token.find('"', 1);
            if (close == std::string::npos) throw ParseError(pos_, "closing '\"'");
            lex = token.substr(1, close - 1);
            if (token.compare(close + 1, 2, "^^") != 0)
                throw ParseError(pos_, "'^^' datatype suffix");
            suffix = token.substr(close + 3);
        } else {
            size_t sep = token.find("^^");
            if (sep == std::string::npos) throw ParseError(pos_, "'^^' datatype suffix");
            lex = token.substr(0, sep);
            suffix = token.substr(sep + 2);
        }
        auto dt = datatype_from_suffix(suffix);
        if (!dt) throw ParseError(pos_, "known datatype suffix");
        if (*dt == Datatype::String) throw ParseError(pos_, "numeric or date literal");
        Literal lit{lex, *dt};
        if (!literal_valid(lit)) throw ParseError(pos_, "well-formed literal");
        return lit;
    }

    SexprPtr parse_node() {
        expect('(');
        std::string head = take_token("operator");
        SexprPtr node;
        if (head == "JOIN") {
            skip_ws();
            bool reverse = false;
            std::string relation;
            if (peek() == '(') {
                size_t open = pos_;
                ++pos_;
                std::string inner = take_token("operator");
                if (inner != "R") throw ParseError(open, "(R relation)");
                relation = take_token("relation id");
                expect(')');
                reverse = true;
            } else {
                relation = take_token("relation id");
            }
            node = sexpr_join(std::move(relation), reverse, parse_operand(false));
        } else if (head == "AND") {
            auto left = parse_set_or_class();
            node = sexpr_and(std::move(left), parse_operand(false));
        } else if (head == "ARGMAX" || head == "ARGMIN") {
            auto source = parse_set_or_class();
            node = sexpr_arg(head == "ARGMAX", std::move(source), take_token("relation id"));
        } else if (head == "COUNT") {
            node = sexpr_count(parse_operand(false));
        } else if (head == "lt" || head == "le" || head == "gt" || head == "ge") {
            CmpOp op = head == "lt"   ? CmpOp::Lt
                       : head == "le" ? CmpOp::Le
                       : head == "gt" ? CmpOp::Gt
                                      : CmpOp::Ge;
            std::string relation = take_token("relation id");
            skip_ws();
            if (peek() == '?') {
                node = sexpr_cmp_var(op, std::move(relation), take_token("value variable"));
            } else {
                node = sexpr_cmp(op, std::move(relation), parse_cmp_literal());
            }
        } else {
            throw ParseError(pos_, "known operator");
        }
        expect(')');
        return node;
    }
};

void write_sexpr(const SexprPtr& node, std::string& out) {
    switch (node->kind) {
        case SexprNode::Kind::Entity:
        case SexprNode::Kind::Class:
            out += node->symbol;
            return;
        case SexprNode::Kind::Join:
            out += "(JOIN ";
            if (node->reverse) {
                out += "(R ";
                out += node->symbol;
                out += ")";
            } else {
                out += node->symbol;
            }
            out += ' ';
            write_sexpr(node->child, out);
            out += ')';
            return;
        case SexprNode::Kind::And:
            out += "(AND ";
            write_sexpr(node->child, out);
            out += ' ';
            write_sexpr(node->right, out);
            out += ')';
            return;
        case SexprNode::Kind::ArgMax:
        case SexprNode::Kind::ArgMin:
            out += node->kind == SexprNode::Kind::ArgMax ? "(ARGMAX " : "(ARGMIN ";
            write_sexpr(node->child, out);
            out += ' ';
            out += node->symbol;
            out += ')';
            return;
        case SexprNode::Kind::Cmp:
            out += '(';
            out += cmp_op_keyword(node->op);
            out += ' ';
            out += node->symbol;
            out += ' ';
            if (!node->value_var.empty()) {
                out += node->value_var;
            } else {
                out += node->literal.lexical;
                out += "^^";
                out += datatype_name(node->literal.dt);
            }
            out += ')';
            return;
        case SexprNode::Kind::Count:
            out += "(COUNT ";
            write_sexpr(node->child, out);
            out += ')';
            return;
    }
}

}  // namespace

Program parse_sexpr(const std::string& text) {
    SexprParser parser(text);
    return make_program(parser.parse());
}

std::string canonicalize(const SexprPtr& node) {
    std::string out;
    write_sexpr(node, out);
    return out;
}

}  // namespace flexqa
