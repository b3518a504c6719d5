#include "flexqa/execute.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "flexqa/errors.hpp"

namespace flexqa {

namespace {

// Comparison domain: numbers and ISO dates, never mixed.
struct CmpKey {
    bool is_date = false;
    double num = 0.0;
    std::string date;
};

CmpKey comparable_key(const Term& t) {
    if (t.is_literal()) {
        if (t.lit.dt == Datatype::Integer || t.lit.dt == Datatype::Double)
            return {false, *t.numeric(), {}};
        if (t.lit.dt == Datatype::Date) return {true, 0.0, t.lit.lexical};
    }
    throw ExecutionError("non-numeric operand: " + t.serialize());
}

int compare(const CmpKey& a, const CmpKey& b) {
    if (a.is_date != b.is_date) throw ExecutionError("mixed comparison operands");
    if (a.is_date) return a.date.compare(b.date);
    if (a.num < b.num) return -1;
    return a.num > b.num ? 1 : 0;
}

bool cmp_holds(const Term& lhs, CmpOp op, const Term& rhs) {
    if (op == CmpOp::Ne) {
        bool lc = lhs.is_literal() && lhs.lit.dt != Datatype::String;
        bool rc = rhs.is_literal() && rhs.lit.dt != Datatype::String;
        if (lc && rc) {
            CmpKey a = comparable_key(lhs), b = comparable_key(rhs);
            if (a.is_date != b.is_date) return true;
            return compare(a, b) != 0;
        }
        return !(lhs == rhs);
    }
    int c = compare(comparable_key(lhs), comparable_key(rhs));
    switch (op) {
        case CmpOp::Lt: return c < 0;
        case CmpOp::Le: return c <= 0;
        case CmpOp::Gt: return c > 0;
        case CmpOp::Ge: return c >= 0;
        case CmpOp::Ne: break;
    }
    return false;
}

Term count_term(size_t n) { return Term::literal(std::to_string(n), Datatype::Integer); }

// ---------------------------------------------------------------------------
// Direct S-expression evaluation.

std::set<Term> eval_sexpr(const SexprPtr& node, const KnowledgeBase& kb) {
    std::set<Term> out;
    switch (node->kind) {
        case SexprNode::Kind::Entity:
            out.insert(Term::entity(node->symbol));
            return out;
        case SexprNode::Kind::Class: {
            MatchPattern mp;
            mp.predicate = kTypePredicate;
            mp.object = Term::cls(node->symbol);
            for (const auto& t : kb.match(mp)) out.insert(Term::entity(t.subject));
            return out;
        }
        case SexprNode::Kind::Join: {
            auto child = eval_sexpr(node->child, kb);
            for (const auto& y : child) {
                MatchPattern mp;
                mp.predicate = node->symbol;
                if (node->reverse) {
                    if (y.is_literal()) continue;  // literals have no outgoing edges
                    mp.subject = y.id;
                    for (const auto& t : kb.match(mp)) out.insert(t.object);
                } else {
                    mp.object = y;
                    for (const auto& t : kb.match(mp)) out.insert(Term::entity(t.subject));
                }
            }
            return out;
        }
        case SexprNode::Kind::And: {
            auto left = eval_sexpr(node->child, kb);
            auto right = eval_sexpr(node->right, kb);
            std::set_intersection(left.begin(), left.end(), right.begin(), right.end(),
                                  std::inserter(out, out.begin()));
            return out;
        }
        case SexprNode::Kind::ArgMax:
        case SexprNode::Kind::ArgMin: {
            bool maximize = node->kind == SexprNode::Kind::ArgMax;
            auto source = eval_sexpr(node->child, kb);
            std::vector<std::pair<Term, CmpKey>> keyed;
            for (const auto& x : source) {
                if (x.is_literal()) continue;
                MatchPattern mp;
                mp.subject = x.id;
                mp.predicate = node->symbol;
                bool has = false;
                CmpKey best;
                for (const auto& t : kb.match(mp)) {
                    CmpKey k = comparable_key(t.object);
                    if (!has || (maximize ? compare(k, best) > 0 : compare(k, best) < 0)) {
                        best = k;
                        has = true;
                    }
                }
                if (has) keyed.emplace_back(x, best);
            }
            if (keyed.empty()) return out;
            CmpKey global = keyed.front().second;
            for (const auto& [x, k] : keyed)
                if (maximize ? compare(k, global) > 0 : compare(k, global) < 0) global = k;
            for (const auto& [x, k] : keyed)
                if (compare(k, global) == 0) out.insert(x);
            return out;
        }
        case SexprNode::Kind::Cmp: {
            if (!node->value_var.empty())
                throw ExecutionError("unbound value variable " + node->value_var);
            Term rhs = Term::literal(node->literal.lexical, node->literal.dt);
            MatchPattern mp;
            mp.predicate = node->symbol;
            for (const auto& t : kb.match(mp))
                if (cmp_holds(t.object, node->op, rhs)) out.insert(Term::entity(t.subject));
            return out;
        }
        case SexprNode::Kind::Count: {
            auto child = eval_sexpr(node->child, kb);
            out.insert(count_term(child.size()));
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// SPARQL-subset evaluation: VALUES seeds rows, patterns joined most-selective
// first, then filters, superlative ties, projection.

using Row = std::map<std::string, Term>;

class SparqlExec {
public:
    SparqlExec(const SparqlQuery& q, const KnowledgeBase& kb) : q_(q), kb_(kb) {}

    ExecutionResult run() {
        resolve_aliases();
        seed_values();
        join_patterns();
        apply_filters();
        apply_superlative();
        return project();
    }

private:
    const SparqlQuery& q_;
    const KnowledgeBase& kb_;
    std::map<std::string, std::string> parent_;  // alias union-find
    std::vector<Row> rows_{Row{}};
    bool dead_ = false;  // contradictory VALUES

    std::string rep(const std::string& var) {
        auto it = parent_.find(var);
        if (it == parent_.end()) return var;
        std::string root = rep(it->second);
        parent_[var] = root;
        return root;
    }

    // VALUES ?a { ?b } makes the two variables one.
    void resolve_aliases() {
        for (const auto& v : q_.values) {
            if (!v.value.is_var) continue;
            std::string a = rep(v.var), b = rep(v.value.var);
            if (a != b) parent_[a] = b;
        }
    }

    void seed_values() {
        Row& row = rows_.front();
        for (const auto& v : q_.values) {
            if (v.value.is_var) continue;
            std::string r = rep(v.var);
            auto it = row.find(r);
            if (it != row.end() && !(it->second == v.value.term)) {
                dead_ = true;
                return;
            }
            row[r] = v.value.term;
        }
    }

    struct Slot {
        bool is_var = false;
        std::string var;  // representative
        Term term;
    };

    Slot resolve_slot(const TermOrVar& tv) {
        Slot s;
        if (tv.is_var) {
            s.is_var = true;
            s.var = rep(tv.var);
        } else {
            s.term = tv.term;
        }
        return s;
    }

    static bool bind(Row& row, const Slot& slot, Term value) {
        if (!slot.is_var) return true;
        auto it = row.find(slot.var);
        if (it != row.end()) return it->second == value;
        row.emplace(slot.var, std::move(value));
        return true;
    }

    size_t selectivity(const TriplePatternAst& p, const std::set<std::string>& bound) {
        size_t n = 0;
        for (const TermOrVar* tv : {&p.subject, &p.predicate, &p.object}) {
            if (!tv->is_var || bound.count(rep(tv->var))) ++n;
        }
        return n;
    }

    size_t constant_estimate(const TriplePatternAst& p) {
        MatchPattern mp;
        if (!p.subject.is_var) mp.subject = p.subject.term.id;
        if (!p.predicate.is_var) mp.predicate = p.predicate.term.id;
        if (!p.object.is_var) mp.object = p.object.term;
        return kb_.match_count_estimate(mp);
    }

    std::vector<size_t> pattern_order() {
        std::set<std::string> bound;
        for (const auto& [var, term] : rows_.front()) bound.insert(var);
        std::vector<size_t> order, remaining(q_.patterns.size());
        for (size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
        while (!remaining.empty()) {
            size_t best = 0;
            for (size_t j = 1; j < remaining.size(); ++j) {
                const auto &a = q_.patterns[remaining[j]], &b = q_.patterns[remaining[best]];
                size_t sa = selectivity(a, bound), sb = selectivity(b, bound);
                if (sa > sb || (sa == sb && constant_estimate(a) < constant_estimate(b)))
                    best = j;
            }
            size_t idx = remaining[best];
            remaining.erase(remaining.begin() + best);
            order.push_back(idx);
            for (const TermOrVar* tv :
                 {&q_.patterns[idx].subject, &q_.patterns[idx].predicate, &q_.patterns[idx].object})
                if (tv->is_var) bound.insert(rep(tv->var));
        }
        return order;
    }

    void join_patterns() {
        if (dead_) {
            rows_.clear();
            return;
        }
        for (size_t idx : pattern_order()) {
            const auto& p = q_.patterns[idx];
            Slot s = resolve_slot(p.subject), pr = resolve_slot(p.predicate),
                 o = resolve_slot(p.object);
            std::vector<Row> next;
            for (const auto& row : rows_) {
                MatchPattern mp;
                bool impossible = false;
                auto fill_id = [&](const Slot& slot, std::optional<std::string>& out) {
                    if (!slot.is_var) {
                        if (slot.term.is_literal()) impossible = true;
                        else out = slot.term.id;
                        return;
                    }
                    auto it = row.find(slot.var);
                    if (it == row.end()) return;
                    if (it->second.is_literal()) impossible = true;
                    else out = it->second.id;
                };
                fill_id(s, mp.subject);
                fill_id(pr, mp.predicate);
                if (!o.is_var) {
                    mp.object = o.term;
                } else {
                    auto it = row.find(o.var);
                    if (it != row.end()) mp.object = it->second;
                }
                if (impossible) continue;
                for (const auto& t : kb_.match(mp)) {
                    Row r2 = row;
                    if (bind(r2, s, Term::entity(t.subject)) &&
                        bind(r2, pr, Term::entity(t.predicate)) && bind(r2, o, t.object))
                        next.push_back(std::move(r2));
                }
            }
            rows_ = std::move(next);
            if (rows_.empty()) return;
        }
    }

    const Term& bound_value(const Row& row, const std::string& var, const char* role) {
        auto it = row.find(rep(var));
        if (it == row.end())
            throw ExecutionError(std::string("unbound ") + role + " variable: ?" + var);
        return it->second;
    }

    void apply_filters() {
        if (q_.filters.empty() || rows_.empty()) return;
        std::vector<Row> kept;
        for (const auto& row : rows_) {
            bool ok = true;
            for (const auto& f : q_.filters) {
                if (const auto* neq = std::get_if<FilterNeq>(&f)) {
                    ok = !(bound_value(row, neq->a, "filter") == bound_value(row, neq->b, "filter"));
                } else {
                    const auto& cmp = std::get<FilterCmp>(f);
                    const Term& lhs = bound_value(row, cmp.var, "filter");
                    const Term& rhs = cmp.rhs.is_var
                                          ? bound_value(row, cmp.rhs.var, "filter")
                                          : cmp.rhs.term;
                    ok = cmp_holds(lhs, cmp.op, rhs);
                }
                if (!ok) break;
            }
            if (ok) kept.push_back(row);
        }
        rows_ = std::move(kept);
    }

    void apply_superlative() {
        if (!q_.superlative || rows_.empty()) return;
        bool maximize = q_.superlative->maximize;
        std::vector<CmpKey> keys;
        keys.reserve(rows_.size());
        for (const auto& row : rows_)
            keys.push_back(comparable_key(bound_value(row, q_.superlative->var, "superlative")));
        CmpKey global = keys.front();
        for (const auto& k : keys)
            if (maximize ? compare(k, global) > 0 : compare(k, global) < 0) global = k;
        std::vector<Row> kept;
        for (size_t i = 0; i < rows_.size(); ++i)
            if (compare(keys[i], global) == 0) kept.push_back(rows_[i]);
        rows_ = std::move(kept);
    }

    ExecutionResult project() {
        ExecutionResult result;
        if (q_.form == QueryForm::Ask) {
            result.answers.push_back(
                Term::literal(rows_.empty() ? "false" : "true", Datatype::String));
            return result;
        }
        std::set<Term> distinct;
        for (const auto& row : rows_) distinct.insert(bound_value(row, q_.projected, "projected"));
        if (q_.form == QueryForm::SelectCount) {
            result.answers.push_back(count_term(distinct.size()));
        } else {
            result.answers.assign(distinct.begin(), distinct.end());
        }
        return result;
    }
};

}  // namespace

std::vector<std::string> ExecutionResult::serialized() const {
    std::vector<std::string> out;
    out.reserve(answers.size());
    for (const auto& t : answers) out.push_back(t.serialize());
    return out;
}

ExecutionResult execute(const Program& program, const KnowledgeBase& kb) {
    if (program.lang == Lang::Sexpr) {
        auto set = eval_sexpr(program.sexpr, kb);
        ExecutionResult result;
        result.answers.assign(set.begin(), set.end());
        return result;
    }
    SparqlExec exec(*program.sparql, kb);
    return exec.run();
}

}  // namespace flexqa
