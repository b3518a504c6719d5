#include <cctype>
#include <string>
#include <vector>

#include "flexqa/errors.hpp"
#include "flexqa/kb.hpp"
#include "flexqa/program.hpp"
#include "flexqa/text.hpp"

namespace flexqa {

namespace {

bool iequals(const std::string& a, const char* b) {
    size_t n = 0;
    for (; n < a.size(); ++n) {
        if (b[n] == '\0') return false;
        if (std::tolower(static_cast<unsigned char>(a[n])) !=
            std::tolower(static_cast<unsigned char>(b[n])))
            return false;
    }
    return b[n] == '\0';
}

bool is_unsupported_keyword(const std::string& w) {
    static const char* kReserved[] = {"OPTIONAL", "UNION",  "MINUS", "GRAPH", "SERVICE",
                                      "BIND",     "EXISTS", "NOT",   "PREFIX"};
    for (const char* r : kReserved)
        if (iequals(w, r)) return true;
    return false;
}

struct Token {
    enum class Kind { Word, Quoted, Punct, Op, End };

    Kind kind = Kind::End;
    std::string text;  // Word: raw word; Punct: one of {}(); Op: != < > <= >=
    Literal lit;       // Quoted
    size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;
    Token tok_;

    static bool word_break(char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '{' || c == '}' ||
               c == '(' || c == ')' || c == '"' || c == '<' || c == '>' || c == '!';
    }

    // Strips <angle brackets> and a leading ':' from ids.
    static std::string normalize_id(std::string id) {
        if (!id.empty() && id.front() == ':') id.erase(0, 1);
        return id;
    }

    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        tok_ = Token{};
        tok_.pos = pos_;
        if (pos_ >= text_.size()) return;
        char c = text_[pos_];
        if (c == '{' || c == '}' || c == '(' || c == ')') {
            tok_.kind = Token::Kind::Punct;
            tok_.text = std::string(1, c);
            ++pos_;
            return;
        }
        if (c == '"') {
            size_t close = text_.find('"', pos_ + 1);
            if (close == std::string::npos) throw ParseError(pos_, "closing '\"'");
            std::string lex = text_.substr(pos_ + 1, close - pos_ - 1);
            pos_ = close + 1;
            Datatype dt = Datatype::String;
            if (text_.compare(pos_, 2, "^^") == 0) {
                pos_ += 2;
                size_t start = pos_;
                if (pos_ < text_.size() && text_[pos_] == '<') {
                    size_t end = text_.find('>', pos_);
                    if (end == std::string::npos) throw ParseError(pos_, "'>'");
                    start = pos_ + 1;
                    pos_ = end + 1;
                    auto parsed = datatype_from_suffix(text_.substr(start, end - start));
                    if (!parsed) throw ParseError(start, "known datatype suffix");
                    dt = *parsed;
                } else {
                    while (pos_ < text_.size() && !word_break(text_[pos_])) ++pos_;
                    auto parsed = datatype_from_suffix(text_.substr(start, pos_ - start));
                    if (!parsed) throw ParseError(start, "known datatype suffix");
                    dt = *parsed;
                }
            }
            tok_.kind = Token::Kind::Quoted;
            tok_.lit = Literal{lex, dt};
            if (!literal_valid(tok_.lit)) throw ParseError(tok_.pos, "well-formed literal");
            return;
        }
        if (c == '<') {
            if (pos_ + 1 < text_.size() && (text_[pos_ + 1] == '=' ||
                                            std::isspace(static_cast<unsigned char>(text_[pos_ + 1])))) {
                tok_.kind = Token::Kind::Op;
                tok_.text = text_[pos_ + 1] == '=' ? "<=" : "<";
                pos_ += tok_.text.size();
                return;
            }
            size_t end = text_.find('>', pos_);
            if (end == std::string::npos) throw ParseError(pos_, "'>'");
            tok_.kind = Token::Kind::Word;
            tok_.text = normalize_id(text_.substr(pos_ + 1, end - pos_ - 1));
            pos_ = end + 1;
            return;
        }
        if (c == '>') {
            tok_.kind = Token::Kind::Op;
            tok_.text = (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') ? ">=" : ">";
            pos_ += tok_.text.size();
            return;
        }
        if (c == '!') {
            if (pos_ + 1 >= text_.size() || text_[pos_ + 1] != '=')
                throw ParseError(pos_, "'!='");
            tok_.kind = Token::Kind::Op;
            tok_.text = "!=";
            pos_ += 2;
            return;
        }
        size_t start = pos_;
        while (pos_ < text_.size() && !word_break(text_[pos_])) ++pos_;
        tok_.kind = Token::Kind::Word;
        tok_.text = text_.substr(start, pos_ - start);
        if (tok_.text != ".") tok_.text = normalize_id(tok_.text);
    }
};

class SparqlParser {
public:
    explicit SparqlParser(const std::string& text) : lex_(text) {}

    SparqlQuery parse() {
        Token head = expect_word("SELECT or ASK");
        if (iequals(head.text, "ASK")) {
            q_.form = QueryForm::Ask;
        } else if (iequals(head.text, "SELECT")) {
            parse_projection();
            Token where = expect_word("WHERE");
            if (!iequals(where.text, "WHERE")) throw ParseError(where.pos, "WHERE");
        } else {
            throw ParseError(head.pos, "SELECT or ASK");
        }
        parse_group();
        if (lex_.peek().kind == Token::Kind::Word && iequals(lex_.peek().text, "ORDER"))
            parse_superlative();
        if (lex_.peek().kind != Token::Kind::End)
            throw ParseError(lex_.peek().pos, "end of input");
        apply_class_hints();
        return std::move(q_);
    }

private:
    Lexer lex_;
    SparqlQuery q_;

    Token expect_word(const char* what) {
        Token t = lex_.take();
        if (t.kind != Token::Kind::Word) throw ParseError(t.pos, what);
        return t;
    }

    void expect_punct(char c) {
        Token t = lex_.take();
        if (t.kind != Token::Kind::Punct || t.text[0] != c)
            throw ParseError(t.pos, std::string("'") + c + "'");
    }

    std::string expect_var() {
        Token t = expect_word("variable");
        if (!is_var_token(t.text)) throw ParseError(t.pos, "variable");
        return t.text.substr(1);
    }

    void parse_projection() {
        q_.form = QueryForm::Select;
        if (lex_.peek().kind == Token::Kind::Word && iequals(lex_.peek().text, "DISTINCT"))
            lex_.take();
        if (lex_.peek().kind == Token::Kind::Word) {
            q_.projected = expect_var();
            return;
        }
        expect_punct('(');
        Token t = expect_word("variable or COUNT");
        if (iequals(t.text, "COUNT")) {
            q_.form = QueryForm::SelectCount;
            expect_punct('(');
            if (lex_.peek().kind == Token::Kind::Word && iequals(lex_.peek().text, "DISTINCT"))
                lex_.take();
            q_.projected = expect_var();
            expect_punct(')');
        } else if (is_var_token(t.text)) {
            q_.projected = t.text.substr(1);
        } else {
            throw ParseError(t.pos, "variable or COUNT");
        }
        Token as = expect_word("AS");
        if (!iequals(as.text, "AS")) throw ParseError(as.pos, "AS");
        expect_var();
        expect_punct(')');
    }

    TermOrVar parse_operand(const char* what) {
        Token t = lex_.take();
        if (t.kind == Token::Kind::Quoted)
            return TermOrVar::constant(Term::literal(t.lit.lexical, t.lit.dt));
        if (t.kind != Token::Kind::Word) throw ParseError(t.pos, what);
        if (is_var_token(t.text)) return TermOrVar::variable(t.text.substr(1));
        if (is_unsupported_keyword(t.text))
            throw ParseError(t.pos, "construct inside subset");
        if (!id_valid(t.text)) throw ParseError(t.pos, what);
        return TermOrVar::constant(Term::entity(t.text));
    }

    void parse_values() {
        ValuesBinding vb;
        vb.var = expect_var();
        expect_punct('{');
        vb.value = parse_operand("VALUES binding");
        Token close = lex_.take();
        if (close.kind != Token::Kind::Punct || close.text != "}")
            throw ParseError(close.pos, "single VALUES binding then '}'");
        q_.values.push_back(std::move(vb));
    }

    void parse_filter() {
        expect_punct('(');
        std::string lhs = expect_var();
        Token op = lex_.take();
        if (op.kind != Token::Kind::Op) throw ParseError(op.pos, "comparison operator");
        TermOrVar rhs = parse_operand("variable or literal");
        expect_punct(')');
        if (op.text == "!=") {
            if (rhs.is_var) {
                q_.filters.push_back(FilterNeq{lhs, rhs.var});
            } else {
                q_.filters.push_back(FilterCmp{lhs, CmpOp::Ne, rhs});
            }
        } else {
            CmpOp c = op.text == "<"    ? CmpOp::Lt
                      : op.text == "<=" ? CmpOp::Le
                      : op.text == ">"  ? CmpOp::Gt
                                        : CmpOp::Ge;
            if (!rhs.is_var && !rhs.term.is_literal())
                throw ParseError(op.pos, "literal right-hand side");
            q_.filters.push_back(FilterCmp{lhs, c, rhs});
        }
        consume_dot();
    }

    void consume_dot() {
        if (lex_.peek().kind == Token::Kind::Word && lex_.peek().text == ".") lex_.take();
    }

    void parse_pattern(Token first) {
        auto slot = [this](Token t, const char* what) -> TermOrVar {
            if (t.kind == Token::Kind::Quoted)
                return TermOrVar::constant(Term::literal(t.lit.lexical, t.lit.dt));
            if (t.kind != Token::Kind::Word) throw ParseError(t.pos, what);
            if (is_var_token(t.text)) return TermOrVar::variable(t.text.substr(1));
            if (is_unsupported_keyword(t.text))
                throw ParseError(t.pos, "construct inside subset");
            if (!id_valid(t.text)) throw ParseError(t.pos, what);
            return TermOrVar::constant(Term::entity(t.text));
        };
        TriplePatternAst p;
        size_t subject_pos = first.pos;
        p.subject = slot(std::move(first), "subject");
        if (!p.subject.is_var && p.subject.term.is_literal())
            throw ParseError(subject_pos, "entity or variable subject");
        Token pred = lex_.take();
        size_t pred_pos = pred.pos;
        p.predicate = slot(std::move(pred), "predicate");
        if (!p.predicate.is_var && p.predicate.term.is_literal())
            throw ParseError(pred_pos, "relation id or variable predicate");
        p.object = slot(lex_.take(), "object");
        q_.patterns.push_back(std::move(p));
        consume_dot();
    }

    void parse_group() {
        expect_punct('{');
        while (true) {
            Token t = lex_.take();
            if (t.kind == Token::Kind::Punct && t.text == "}") break;
            if (t.kind == Token::Kind::End) throw ParseError(t.pos, "'}'");
            if (t.kind == Token::Kind::Word && iequals(t.text, "VALUES")) {
                parse_values();
            } else if (t.kind == Token::Kind::Word && iequals(t.text, "FILTER")) {
                parse_filter();
            } else if (t.kind == Token::Kind::Word && is_unsupported_keyword(t.text)) {
                throw ParseError(t.pos, "construct inside subset");
            } else {
                parse_pattern(std::move(t));
            }
        }
    }

    void parse_superlative() {
        lex_.take();  // ORDER
        Token by = expect_word("BY");
        if (!iequals(by.text, "BY")) throw ParseError(by.pos, "BY");
        Token dir = expect_word("ASC or DESC");
        Superlative s;
        if (iequals(dir.text, "DESC")) {
            s.maximize = true;
        } else if (iequals(dir.text, "ASC")) {
            s.maximize = false;
        } else {
            throw ParseError(dir.pos, "ASC or DESC");
        }
        expect_punct('(');
        s.var = expect_var();
        expect_punct(')');
        Token limit = expect_word("LIMIT");
        if (!iequals(limit.text, "LIMIT")) throw ParseError(limit.pos, "LIMIT");
        Token one = expect_word("1");
        if (one.text != "1") throw ParseError(one.pos, "LIMIT 1");
        q_.superlative = s;
    }

    // Objects of the type predicate are class ids.
    void apply_class_hints() {
        for (auto& p : q_.patterns) {
            if (p.predicate.is_var || p.predicate.term.id != kTypePredicate) continue;
            if (!p.object.is_var && p.object.term.is_entity())
                p.object.term = Term::cls(p.object.term.id);
        }
    }
};

std::string write_operand(const TermOrVar& tv) {
    if (tv.is_var) return "?" + tv.var;
    return tv.term.serialize();
}

}  // namespace

Program parse_sparql(const std::string& text) {
    SparqlParser parser(text);
    return make_program(parser.parse());
}

std::string canonicalize(const SparqlQuery& q) {
    std::string out;
    switch (q.form) {
        case QueryForm::Select:
            out = "SELECT DISTINCT ?" + q.projected + " WHERE ";
            break;
        case QueryForm::SelectCount:
            out = "SELECT (COUNT(DISTINCT ?" + q.projected + ") AS ?count) WHERE ";
            break;
        case QueryForm::Ask:
            out = "ASK ";
            break;
    }
    out += '{';
    for (const auto& p : q.patterns) {
        out += ' ';
        out += write_operand(p.subject);
        out += ' ';
        out += write_operand(p.predicate);
        out += ' ';
        out += write_operand(p.object);
        out += " .";
    }
    for (const auto& v : q.values) {
        out += " VALUES ?" + v.var + " { " + write_operand(v.value) + " }";
    }
    for (const auto& f : q.filters) {
        out += " FILTER ( ";
        if (const auto* neq = std::get_if<FilterNeq>(&f)) {
            out += "?" + neq->a + " != ?" + neq->b;
        } else {
            const auto& cmp = std::get<FilterCmp>(f);
            out += "?" + cmp.var + " " + cmp_op_symbol(cmp.op) + " " + write_operand(cmp.rhs);
        }
        out += " )";
    }
    out += " }";
    if (q.superlative) {
        out += " ORDER BY ";
        out += q.superlative->maximize ? "DESC" : "ASC";
        out += "(?" + q.superlative->var + ") LIMIT 1";
    }
    return out;
}

}  // namespace flexqa
