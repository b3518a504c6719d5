#include "flexqa/sampler.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>

#include "flexqa/errors.hpp"

namespace flexqa {

const char* var_kind_name(VarKind kind) {
    switch (kind) {
        case VarKind::Entity: return "entity";
        case VarKind::Relation: return "relation";
        case VarKind::Class: return "class";
        case VarKind::Value: return "value";
    }
    return "entity";
}

namespace {

// Collects distinct constants in first-occurrence order, one list per kind.
struct ConstantScan {
    std::vector<std::string> entities, classes, relations;
    std::vector<Literal> literals;

    void see_entity(const std::string& id) { push(entities, id); }
    void see_class(const std::string& id) { push(classes, id); }
    void see_relation(const std::string& id) {
        if (id != kTypePredicate) push(relations, id);
    }
    void see_literal(const Literal& lit) {
        for (const auto& l : literals)
            if (l == lit) return;
        literals.push_back(lit);
    }

private:
    static void push(std::vector<std::string>& list, const std::string& id) {
        if (std::find(list.begin(), list.end(), id) == list.end()) list.push_back(id);
    }
};

void scan_sexpr(const SexprPtr& node, ConstantScan& scan) {
    if (!node) return;
    switch (node->kind) {
        case SexprNode::Kind::Entity:
            if (!is_var_token(node->symbol)) scan.see_entity(node->symbol);
            break;
        case SexprNode::Kind::Class:
            if (!is_var_token(node->symbol)) scan.see_class(node->symbol);
            break;
        case SexprNode::Kind::Join:
        case SexprNode::Kind::ArgMax:
        case SexprNode::Kind::ArgMin:
            if (!is_var_token(node->symbol)) scan.see_relation(node->symbol);
            break;
        case SexprNode::Kind::Cmp:
            if (!is_var_token(node->symbol)) scan.see_relation(node->symbol);
            if (node->value_var.empty()) scan.see_literal(node->literal);
            break;
        case SexprNode::Kind::And:
        case SexprNode::Kind::Count:
            break;
    }
    scan_sexpr(node->child, scan);
    scan_sexpr(node->right, scan);
}

void scan_sparql(const SparqlQuery& q, ConstantScan& scan) {
    for (const auto& p : q.patterns) {
        if (!p.subject.is_var && p.subject.term.is_entity()) scan.see_entity(p.subject.term.id);
        if (!p.predicate.is_var) scan.see_relation(p.predicate.term.id);
        if (!p.object.is_var) {
            if (p.object.term.is_class()) scan.see_class(p.object.term.id);
            else if (p.object.term.is_entity()) scan.see_entity(p.object.term.id);
        }
    }
    for (const auto& v : q.values)
        if (!v.value.is_var && v.value.term.is_entity()) scan.see_entity(v.value.term.id);
    for (const auto& f : q.filters) {
        const auto* cmp = std::get_if<FilterCmp>(&f);
        if (cmp && cmp->op != CmpOp::Ne && !cmp->rhs.is_var && cmp->rhs.term.is_literal())
            scan.see_literal(cmp->rhs.term.lit);
    }
}

// Variable names for each constant. Classes continue the entK numbering after
// entities, matching the published template's ?ent0 (entity) / ?ent1 (class).
struct VarNames {
    std::map<std::string, std::string> entity, cls, relation;
    std::vector<std::pair<Literal, std::string>> literal;

    explicit VarNames(const ConstantScan& scan) {
        size_t ent = 0;
        for (const auto& id : scan.entities) entity[id] = "ent" + std::to_string(ent++);
        for (const auto& id : scan.classes) cls[id] = "ent" + std::to_string(ent++);
        for (size_t i = 0; i < scan.relations.size(); ++i)
            relation[scan.relations[i]] = "rel" + std::to_string(i);
        for (size_t i = 0; i < scan.literals.size(); ++i)
            literal.emplace_back(scan.literals[i], "val" + std::to_string(i));
    }

    const std::string* for_literal(const Literal& lit) const {
        for (const auto& [l, name] : literal)
            if (l == lit) return &name;
        return nullptr;
    }
};

SexprPtr template_sexpr(const SexprPtr& node, const VarNames& names) {
    if (!node) return nullptr;
    auto sub = [&](const std::map<std::string, std::string>& m, const std::string& id) {
        auto it = m.find(id);
        return it == m.end() ? id : "?" + it->second;
    };
    switch (node->kind) {
        case SexprNode::Kind::Entity:
            return sexpr_entity(sub(names.entity, node->symbol));
        case SexprNode::Kind::Class:
            return sexpr_class(sub(names.cls, node->symbol));
        case SexprNode::Kind::Join:
            return sexpr_join(sub(names.relation, node->symbol), node->reverse,
                              template_sexpr(node->child, names));
        case SexprNode::Kind::And:
            return sexpr_and(template_sexpr(node->child, names),
                             template_sexpr(node->right, names));
        case SexprNode::Kind::ArgMax:
        case SexprNode::Kind::ArgMin:
            return sexpr_arg(node->kind == SexprNode::Kind::ArgMax,
                             template_sexpr(node->child, names),
                             sub(names.relation, node->symbol));
        case SexprNode::Kind::Cmp: {
            std::string rel = sub(names.relation, node->symbol);
            if (!node->value_var.empty()) return sexpr_cmp_var(node->op, rel, node->value_var);
            if (const std::string* v = names.for_literal(node->literal))
                return sexpr_cmp_var(node->op, rel, "?" + *v);
            return sexpr_cmp(node->op, rel, node->literal);
        }
        case SexprNode::Kind::Count:
            return sexpr_count(template_sexpr(node->child, names));
    }
    return nullptr;
}

SparqlQuery template_sparql(const SparqlQuery& q, const VarNames& names) {
    SparqlQuery out = q;
    auto sub = [&](TermOrVar& tv) {
        if (tv.is_var || !tv.term.is_entity()) return;
        auto it = names.entity.find(tv.term.id);
        if (it != names.entity.end()) tv = TermOrVar::variable(it->second);
    };
    for (auto& p : out.patterns) {
        sub(p.subject);
        if (!p.predicate.is_var) {
            auto it = names.relation.find(p.predicate.term.id);
            if (it != names.relation.end()) p.predicate = TermOrVar::variable(it->second);
        }
        if (!p.object.is_var) {
            if (p.object.term.is_class()) {
                auto it = names.cls.find(p.object.term.id);
                if (it != names.cls.end()) p.object = TermOrVar::variable(it->second);
            } else {
                sub(p.object);
            }
        }
    }
    for (auto& v : out.values) sub(v.value);
    for (auto& f : out.filters) {
        auto* cmp = std::get_if<FilterCmp>(&f);
        if (!cmp || cmp->op == CmpOp::Ne || cmp->rhs.is_var || !cmp->rhs.term.is_literal())
            continue;
        if (const std::string* v = names.for_literal(cmp->rhs.term.lit))
            cmp->rhs = TermOrVar::variable(*v);
    }
    return out;
}

size_t var_number(const std::string& name) {
    size_t i = name.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(name[i - 1]))) --i;
    return std::stoul(name.substr(i));
}

}  // namespace

ProgramTemplate extract_template(const Program& program) {
    ConstantScan scan;
    if (program.lang == Lang::Sexpr) {
        scan_sexpr(program.sexpr, scan);
    } else {
        scan_sparql(*program.sparql, scan);
    }
    VarNames names(scan);
    ProgramTemplate tmpl;
    tmpl.origin = program.canonical;
    if (program.lang == Lang::Sexpr) {
        tmpl.ast = make_program(template_sexpr(program.sexpr, names));
    } else {
        tmpl.ast = make_program(template_sparql(*program.sparql, names));
    }
    for (const auto& [id, v] : names.entity) tmpl.var_kinds[v] = VarKind::Entity;
    for (const auto& [id, v] : names.cls) tmpl.var_kinds[v] = VarKind::Class;
    for (const auto& [id, v] : names.relation) tmpl.var_kinds[v] = VarKind::Relation;
    for (const auto& [lit, v] : names.literal) tmpl.var_kinds[v] = VarKind::Value;
    return tmpl;
}

GroundingPlan plan_grounding(const ProgramTemplate& tmpl) {
    GroundingPlan plan;
    auto add_kind = [&](VarKind kind) {
        std::vector<std::string> names;
        for (const auto& [name, k] : tmpl.var_kinds)
            if (k == kind) names.push_back(name);
        std::sort(names.begin(), names.end(),
                  [](const std::string& a, const std::string& b) {
                      return var_number(a) < var_number(b);
                  });
        plan.order.insert(plan.order.end(), names.begin(), names.end());
    };
    add_kind(VarKind::Entity);
    add_kind(VarKind::Relation);
    add_kind(VarKind::Class);
    add_kind(VarKind::Value);
    return plan;
}

namespace {

// Substitutes bound template variables into the step query. Relations bind as
// entity terms carrying the relation id.
SparqlQuery substitute(const SparqlQuery& q, const std::map<std::string, Term>& bound) {
    SparqlQuery out = q;
    auto sub = [&](TermOrVar& tv) {
        if (!tv.is_var) return;
        auto it = bound.find(tv.var);
        if (it != bound.end()) tv = TermOrVar::constant(it->second);
    };
    for (auto& p : out.patterns) {
        sub(p.subject);
        sub(p.predicate);
        sub(p.object);
    }
    for (auto& v : out.values) sub(v.value);
    for (auto& f : out.filters)
        if (auto* cmp = std::get_if<FilterCmp>(&f)) sub(cmp->rhs);
    return out;
}

SexprPtr bind_sexpr(const SexprPtr& node, const std::map<std::string, Term>& bound) {
    if (!node) return nullptr;
    auto sub = [&](const std::string& symbol) {
        if (!is_var_token(symbol)) return symbol;
        auto it = bound.find(symbol.substr(1));
        return it == bound.end() ? symbol : it->second.id;
    };
    switch (node->kind) {
        case SexprNode::Kind::Entity:
            return sexpr_entity(sub(node->symbol));
        case SexprNode::Kind::Class:
            return sexpr_class(sub(node->symbol));
        case SexprNode::Kind::Join:
            return sexpr_join(sub(node->symbol), node->reverse, bind_sexpr(node->child, bound));
        case SexprNode::Kind::And:
            return sexpr_and(bind_sexpr(node->child, bound), bind_sexpr(node->right, bound));
        case SexprNode::Kind::ArgMax:
        case SexprNode::Kind::ArgMin:
            return sexpr_arg(node->kind == SexprNode::Kind::ArgMax,
                             bind_sexpr(node->child, bound), sub(node->symbol));
        case SexprNode::Kind::Cmp: {
            if (!node->value_var.empty()) {
                auto it = bound.find(node->value_var.substr(1));
                if (it != bound.end())
                    return sexpr_cmp(node->op, sub(node->symbol), it->second.lit);
                return sexpr_cmp_var(node->op, sub(node->symbol), node->value_var);
            }
            return sexpr_cmp(node->op, sub(node->symbol), node->literal);
        }
        case SexprNode::Kind::Count:
            return sexpr_count(bind_sexpr(node->child, bound));
    }
    return nullptr;
}

class Grounder {
public:
    Grounder(const ProgramTemplate& tmpl, const KnowledgeBase& kb, const SampleConfig& config,
             GroundStats* stats)
        : tmpl_(tmpl), kb_(kb), config_(config), stats_(stats), rng_(config.rng_seed) {}

    std::vector<Program> run() {
        order_ = plan_grounding(tmpl_).order;
        if (tmpl_.ast.lang == Lang::Sexpr) {
            step_base_ = *sexpr_to_sparql(tmpl_.ast).sparql;
        } else {
            step_base_ = *tmpl_.ast.sparql;
        }
        dfs(0);
        return std::move(out_);
    }

private:
    const ProgramTemplate& tmpl_;
    const KnowledgeBase& kb_;
    const SampleConfig& config_;
    GroundStats* stats_;
    std::mt19937_64 rng_;
    std::vector<std::string> order_;
    SparqlQuery step_base_;
    std::map<std::string, Term> bound_;
    std::set<std::string> seen_;
    std::vector<Program> out_;

    void note_exhausted() {
        if (stats_) ++stats_->step_exhausted;
    }

    void note_discarded() {
        if (stats_) ++stats_->discarded;
    }

    bool full() const { return out_.size() >= config_.max_programs; }

    std::vector<Term> step_candidates(const std::string& var, VarKind kind) {
        SparqlQuery q = substitute(step_base_, bound_);
        std::string target = var;
        if (kind == VarKind::Value) {
            for (const auto& f : q.filters) {
                const auto* cmp = std::get_if<FilterCmp>(&f);
                if (cmp && cmp->rhs.is_var && cmp->rhs.var == var) {
                    target = cmp->var;
                    break;
                }
            }
        }
        // Filters whose right side is a still-free value variable cannot run.
        std::erase_if(q.filters, [&](const Filter& f) {
            const auto* cmp = std::get_if<FilterCmp>(&f);
            return cmp && cmp->rhs.is_var && tmpl_.var_kinds.count(cmp->rhs.var);
        });
        q.form = QueryForm::Select;
        q.projected = target;
        q.superlative.reset();
        ExecutionResult result;
        try {
            result = execute(make_program(std::move(q)), kb_);
        } catch (const ExecutionError&) {
            return {};
        }
        std::vector<Term> candidates;
        for (const auto& t : result.answers) {
            switch (kind) {
                case VarKind::Entity:
                    if (t.is_entity()) candidates.push_back(t);
                    break;
                case VarKind::Relation:
                    if (t.is_entity() && t.id != kTypePredicate) candidates.push_back(t);
                    break;
                case VarKind::Class:
                    if (t.is_class()) candidates.push_back(t);
                    break;
                case VarKind::Value:
                    if (t.is_literal()) candidates.push_back(t);
                    break;
            }
        }
        if (kind == VarKind::Entity && !config_.seed_entities.empty()) {
            std::vector<Term> seeded;
            for (const auto& t : candidates)
                if (std::find(config_.seed_entities.begin(), config_.seed_entities.end(),
                              t.id) != config_.seed_entities.end())
                    seeded.push_back(t);
            if (!seeded.empty()) candidates = std::move(seeded);
        }
        return candidates;
    }

    void emit() {
        // Two variables of one kind grounded to the same constant would merge
        // on re-extraction; skip to keep templates recoverable.
        std::map<VarKind, std::set<std::string>> used;
        for (const auto& [var, term] : bound_) {
            auto kind = tmpl_.var_kinds.at(var);
            if (!used[kind].insert(term.key()).second) {
                note_discarded();
                return;
            }
        }
        Program p;
        if (tmpl_.ast.lang == Lang::Sexpr) {
            p = make_program(bind_sexpr(tmpl_.ast.sexpr, bound_));
        } else {
            p = make_program(substitute(*tmpl_.ast.sparql, bound_));
        }
        if (!seen_.insert(p.canonical).second) return;
        if (config_.require_nonempty) {
            try {
                if (execute(p, kb_).empty()) {
                    note_discarded();
                    return;
                }
            } catch (const ExecutionError&) {
                note_discarded();
                return;
            }
        }
        out_.push_back(std::move(p));
    }

    void dfs(size_t step) {
        if (full()) return;
        if (step == order_.size()) {
            emit();
            return;
        }
        const std::string& var = order_[step];
        VarKind kind = tmpl_.var_kinds.at(var);
        std::vector<Term> candidates = step_candidates(var, kind);
        if (candidates.empty()) {
            note_exhausted();
            return;
        }
        if (candidates.size() > config_.per_step_fanout) {
            std::vector<Term> picked;
            std::sample(candidates.begin(), candidates.end(), std::back_inserter(picked),
                        config_.per_step_fanout, rng_);
            candidates = std::move(picked);
        }
        for (const auto& c : candidates) {
            if (full()) return;
            bound_[var] = c;
            dfs(step + 1);
        }
        bound_.erase(var);
    }
};

}  // namespace

std::vector<Program> ground(const ProgramTemplate& tmpl, const KnowledgeBase& kb,
                            const SampleConfig& config, GroundStats* stats) {
    Grounder g(tmpl, kb, config, stats);
    return g.run();
}

std::vector<Program> sample_corpus(const std::vector<ProgramTemplate>& templates,
                                   const KnowledgeBase& kb, const SampleConfig& config) {
    std::vector<std::vector<Program>> streams;
    streams.reserve(templates.size());
    for (size_t i = 0; i < templates.size(); ++i) {
        SampleConfig per = config;
        per.rng_seed = config.rng_seed + i;
        streams.push_back(ground(templates[i], kb, per));
    }
    std::vector<Program> out;
    std::set<std::string> seen;
    std::vector<size_t> cursor(streams.size(), 0);
    bool progressed = true;
    while (progressed && out.size() < config.max_programs) {
        progressed = false;
        for (size_t i = 0; i < streams.size() && out.size() < config.max_programs; ++i) {
            while (cursor[i] < streams[i].size()) {
                Program& p = streams[i][cursor[i]++];
                if (seen.insert(p.canonical).second) {
                    out.push_back(std::move(p));
                    progressed = true;
                    break;
                }
            }
        }
    }
    if (out.empty()) throw EmptyCorpusError();
    return out;
}

}  // namespace flexqa
