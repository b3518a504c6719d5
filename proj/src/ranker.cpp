#include "flexqa/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <variant>

#include "flexqa/errors.hpp"
#include "flexqa/execute.hpp"
#include "flexqa/text.hpp"
#include "flexqa/translate.hpp"
#include "json.hpp"

namespace flexqa {

Question link_entities(const std::string& text, const KnowledgeBase& kb) {
    Question q;
    q.text = text;
    q.tokens = tokenize(text);
    q.linked = kb.scan_surfaces(text);
    return q;
}

namespace {

std::set<std::string> out_predicates(const KnowledgeBase& kb, const std::string& entity) {
    std::set<std::string> preds;
    for (const auto& t : kb.match({entity, std::nullopt, std::nullopt}))
        if (t.predicate != kTypePredicate) preds.insert(t.predicate);
    return preds;
}

std::set<std::string> in_predicates(const KnowledgeBase& kb, const Term& object) {
    std::set<std::string> preds;
    for (const auto& t : kb.match({std::nullopt, std::nullopt, object}))
        if (t.predicate != kTypePredicate) preds.insert(t.predicate);
    return preds;
}

struct Candidate {
    Program program;
    std::vector<Term> answers;
};

class Enumerator {
public:
    Enumerator(const KnowledgeBase& kb) : kb_(kb) {}

    // Executes the AST; keeps it only when new and non-empty.
    bool consider(SexprPtr ast) {
        Program prog = make_program(std::move(ast));
        if (!seen_.insert(prog.canonical).second) return false;
        ExecutionResult result;
        try {
            result = execute(prog, kb_);
        } catch (const ExecutionError&) {
            return false;
        }
        if (result.empty()) return false;
        kept_.push_back(Candidate{std::move(prog), std::move(result.answers)});
        return true;
    }

    const std::vector<Candidate>& kept() const { return kept_; }

private:
    const KnowledgeBase& kb_;
    std::set<std::string> seen_;
    std::vector<Candidate> kept_;
};

bool all_entities(const std::vector<Term>& answers) {
    return std::all_of(answers.begin(), answers.end(),
                       [](const Term& t) { return t.is_entity(); });
}

std::set<std::string> answer_classes(const KnowledgeBase& kb, const std::vector<Term>& answers) {
    std::set<std::string> classes;
    for (const auto& a : answers)
        if (a.is_entity())
            for (const auto& t : kb.match({a.id, std::string(kTypePredicate), std::nullopt}))
                classes.insert(t.object.id);
    return classes;
}

std::set<std::string> numeric_relations(const KnowledgeBase& kb,
                                        const std::vector<Term>& answers) {
    std::set<std::string> rels;
    for (const auto& a : answers) {
        if (!a.is_entity()) continue;
        for (const auto& t : kb.match({a.id, std::nullopt, std::nullopt}))
            if (t.object.is_literal() && t.object.numeric()) rels.insert(t.predicate);
    }
    return rels;
}

}  // namespace

CandidateSet enumerate_candidates(const Question& question, const KnowledgeBase& kb,
                                  size_t cap) {
    std::vector<std::string> topics;
    for (const auto& m : question.linked)
        if (std::find(topics.begin(), topics.end(), m.entity) == topics.end())
            topics.push_back(m.entity);
    if (topics.empty()) throw NoTopicEntityError(question.text);

    Enumerator en(kb);
    std::vector<SexprPtr> hop1;
    for (const auto& entity : topics) {
        for (const auto& r : out_predicates(kb, entity))
            if (en.consider(sexpr_join(r, true, sexpr_entity(entity))))
                hop1.push_back(sexpr_join(r, true, sexpr_entity(entity)));
        for (const auto& r : in_predicates(kb, Term::entity(entity)))
            if (en.consider(sexpr_join(r, false, sexpr_entity(entity))))
                hop1.push_back(sexpr_join(r, false, sexpr_entity(entity)));
    }

    // 2-hop joins grow from the answers of each kept 1-hop set.
    std::vector<SexprPtr> bases = hop1;
    size_t hop1_kept = en.kept().size();
    for (size_t i = 0; i < hop1_kept; ++i) {
        const Candidate& base = en.kept()[i];
        std::set<std::string> outward, inward;
        for (const auto& a : base.answers) {
            if (a.is_entity())
                for (const auto& r : out_predicates(kb, a.id)) outward.insert(r);
            for (const auto& r : in_predicates(kb, a)) inward.insert(r);
        }
        SexprPtr child = hop1[i];
        for (const auto& r : outward)
            if (en.consider(sexpr_join(r, true, child)))
                bases.push_back(sexpr_join(r, true, child));
        for (const auto& r : inward)
            if (en.consider(sexpr_join(r, false, child)))
                bases.push_back(sexpr_join(r, false, child));
    }

    // Class-constrained variants; these stay entity-valued, so they join the
    // wrapper bases too.
    size_t joins_kept = en.kept().size();
    std::vector<SexprPtr> base_asts = bases;
    for (size_t i = 0; i < joins_kept; ++i) {
        if (!all_entities(en.kept()[i].answers)) continue;
        for (const auto& cls : answer_classes(kb, en.kept()[i].answers))
            if (en.consider(sexpr_and(sexpr_class(cls), bases[i])))
                base_asts.push_back(sexpr_and(sexpr_class(cls), bases[i]));
    }

    size_t wrap_bases = en.kept().size();
    for (size_t i = 0; i < wrap_bases; ++i) {
        SexprPtr ast = base_asts[i];
        en.consider(sexpr_count(ast));
        if (!all_entities(en.kept()[i].answers)) continue;
        for (const auto& rel : numeric_relations(kb, en.kept()[i].answers)) {
            en.consider(sexpr_arg(true, ast, rel));
            en.consider(sexpr_arg(false, ast, rel));
        }
    }

    CandidateSet out;
    out.question = question;
    for (const auto& c : en.kept()) out.candidates.push_back(c.program);
    std::stable_sort(out.candidates.begin(), out.candidates.end(),
                     [](const Program& a, const Program& b) {
                         int ha = program_hops(a), hb = program_hops(b);
                         if (ha != hb) return ha < hb;
                         return a.canonical < b.canonical;
                     });
    if (out.candidates.size() > cap) out.candidates.resize(cap);
    return out;
}

namespace {

// Constants and operator flags of a program, either language.
struct ProgramSymbols {
    std::set<std::string> entities;
    std::set<std::string> classes;
    std::vector<std::string> literals;
    bool has_count = false;
    bool has_argmax = false;
    bool has_argmin = false;
    bool has_cmp = false;
};

void collect_sexpr(const SexprPtr& node, ProgramSymbols& sym) {
    switch (node->kind) {
        case SexprNode::Kind::Entity:
            sym.entities.insert(node->symbol);
            break;
        case SexprNode::Kind::Class:
            sym.classes.insert(node->symbol);
            break;
        case SexprNode::Kind::Join:
            collect_sexpr(node->child, sym);
            break;
        case SexprNode::Kind::And:
            collect_sexpr(node->child, sym);
            collect_sexpr(node->right, sym);
            break;
        case SexprNode::Kind::ArgMax:
            sym.has_argmax = true;
            collect_sexpr(node->child, sym);
            break;
        case SexprNode::Kind::ArgMin:
            sym.has_argmin = true;
            collect_sexpr(node->child, sym);
            break;
        case SexprNode::Kind::Cmp:
            sym.has_cmp = true;
            if (node->value_var.empty()) sym.literals.push_back(node->literal.lexical);
            break;
        case SexprNode::Kind::Count:
            sym.has_count = true;
            collect_sexpr(node->child, sym);
            break;
    }
}

void collect_term(const Term& t, ProgramSymbols& sym) {
    if (t.is_entity())
        sym.entities.insert(t.id);
    else if (t.is_class())
        sym.classes.insert(t.id);
    else
        sym.literals.push_back(t.lit.lexical);
}

ProgramSymbols collect_symbols(const Program& program) {
    ProgramSymbols sym;
    if (program.lang == Lang::Sexpr) {
        collect_sexpr(program.sexpr, sym);
        return sym;
    }
    const SparqlQuery& q = *program.sparql;
    sym.has_count = q.form == QueryForm::SelectCount;
    if (q.superlative) (q.superlative->maximize ? sym.has_argmax : sym.has_argmin) = true;
    for (const auto& p : q.patterns) {
        if (!p.subject.is_var) collect_term(p.subject.term, sym);
        if (!p.object.is_var) collect_term(p.object.term, sym);
    }
    for (const auto& v : q.values)
        if (!v.value.is_var) collect_term(v.value.term, sym);
    for (const auto& f : q.filters) {
        const auto* cmp = std::get_if<FilterCmp>(&f);
        if (!cmp) continue;
        if (cmp->op != CmpOp::Ne) sym.has_cmp = true;
        if (!cmp->rhs.is_var) sym.literals.push_back(cmp->rhs.term.lit.lexical);
    }
    return sym;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

}  // namespace

FeatureVector featurize(const Question& question, const Program& program,
                        const KnowledgeBase& kb, const FeaturizeOptions& opts) {
    std::set<std::string> qtokens(question.tokens.begin(), question.tokens.end());
    ProgramSymbols sym = collect_symbols(program);

    std::set<std::string> pool;
    std::vector<std::string> rels = program_relations(program);
    double jacc_sum = 0.0;
    for (const auto& rel : rels) {
        std::vector<std::string> toks = tokenize(verbalize_id(rel));
        std::set<std::string> rel_tokens(toks.begin(), toks.end());
        jacc_sum += jaccard(rel_tokens, qtokens);
        pool.insert(rel_tokens.begin(), rel_tokens.end());
    }
    for (const auto& id : sym.entities)
        if (auto name = kb.surface_name(id))
            for (const auto& tok : tokenize(*name)) pool.insert(tok);
    for (const auto& id : sym.classes)
        for (const auto& tok : tokenize(verbalize_id(id))) pool.insert(tok);
    for (const auto& lex : sym.literals)
        for (const auto& tok : tokenize(lex)) pool.insert(tok);
    // Operator words ("how many", "largest") only exist in the verbalization,
    // so coverage is the one lexical feature that ties them to the question.
    for (const auto& tok : tokenize(verbalize_program(program, kb))) pool.insert(tok);

    size_t covered = 0;
    for (const auto& tok : qtokens) covered += pool.count(tok);

    size_t entity_matches = 0;
    std::set<std::string> counted;
    for (const auto& m : question.linked)
        if (sym.entities.count(m.entity) && counted.insert(m.entity).second) ++entity_matches;

    FeatureVector fv;
    fv["bias"] = 1.0;
    fv["rel_jaccard"] = rels.empty() ? 0.0 : jacc_sum / static_cast<double>(rels.size());
    fv["coverage"] =
        qtokens.empty() ? 0.0 : static_cast<double>(covered) / static_cast<double>(qtokens.size());
    fv["hops"] = static_cast<double>(program_hops(program));
    fv["op_count"] = sym.has_count ? 1.0 : 0.0;
    fv["op_argmax"] = sym.has_argmax ? 1.0 : 0.0;
    fv["op_argmin"] = sym.has_argmin ? 1.0 : 0.0;
    fv["op_cmp"] = sym.has_cmp ? 1.0 : 0.0;
    fv["entity_matches"] = static_cast<double>(entity_matches);
    if (opts.embedder) {
        try {
            fv["embed_cos"] = cosine(opts.embedder->embed(question.text),
                                     opts.embedder->embed(verbalize_program(program, kb)));
        } catch (const EmptyTextError&) {
            fv["embed_cos"] = 0.0;
        }
    }
    return fv;
}

double score(const RankerParams& params, const FeatureVector& fv) {
    double s = 0.0;
    for (const auto& [name, value] : fv) {
        auto it = params.weights.find(name);
        if (it != params.weights.end()) s += it->second * value;
    }
    return s;
}

namespace {

double loss_and_grad(const RankerParams& params,
                     const std::vector<const FeatureVector*>& features, size_t gold_index,
                     std::map<std::string, double>* grad) {
    std::vector<double> scores(features.size());
    for (size_t i = 0; i < features.size(); ++i) scores[i] = score(params, *features[i]);
    double m = *std::max_element(scores.begin(), scores.end());
    double denom = 0.0;
    for (double s : scores) denom += std::exp(s - m);
    double loss = std::log(denom) + m - scores[gold_index];
    if (grad) {
        grad->clear();
        for (size_t i = 0; i < features.size(); ++i) {
            double coeff = std::exp(scores[i] - m) / denom - (i == gold_index ? 1.0 : 0.0);
            for (const auto& [name, value] : *features[i]) (*grad)[name] += coeff * value;
        }
    }
    return loss;
}

std::vector<const FeatureVector*> as_pointers(const std::vector<FeatureVector>& features) {
    std::vector<const FeatureVector*> ptrs;
    ptrs.reserve(features.size());
    for (const auto& fv : features) ptrs.push_back(&fv);
    return ptrs;
}

}  // namespace

double ranker_loss(const RankerParams& params, const std::vector<FeatureVector>& features,
                   size_t gold_index) {
    return loss_and_grad(params, as_pointers(features), gold_index, nullptr);
}

std::map<std::string, double> ranker_loss_grad(const RankerParams& params,
                                               const std::vector<FeatureVector>& features,
                                               size_t gold_index) {
    std::map<std::string, double> grad;
    loss_and_grad(params, as_pointers(features), gold_index, &grad);
    return grad;
}

double ranker_loss(const RankerParams& params, const Question& question, const Program& gold,
                   const CandidateSet& candidates, const KnowledgeBase& kb,
                   const FeaturizeOptions& opts) {
    std::vector<FeatureVector> features;
    features.push_back(featurize(question, gold, kb, opts));
    for (const auto& c : candidates.candidates)
        if (c.canonical != gold.canonical) features.push_back(featurize(question, c, kb, opts));
    return ranker_loss(params, features, 0);
}

RankerParams train(const std::vector<DataPair>& pairs, const KnowledgeBase& kb,
                   const TrainConfig& config, const RankerParams& init, TrainReport* report) {
    struct Example {
        std::vector<FeatureVector> feats;  // gold first
    };
    std::vector<Example> examples;
    size_t skipped = 0;
    for (const auto& pair : pairs) {
        Question q = link_entities(pair.question, kb);
        CandidateSet cands;
        try {
            cands = enumerate_candidates(q, kb, config.enumeration_cap);
        } catch (const NoTopicEntityError&) {
            ++skipped;
            continue;
        }
        Example ex;
        ex.feats.push_back(featurize(q, pair.program, kb, config.features));
        for (const auto& c : cands.candidates)
            if (c.canonical != pair.program.canonical)
                ex.feats.push_back(featurize(q, c, kb, config.features));
        examples.push_back(std::move(ex));
    }
    if (examples.empty()) throw NoTrainableExamplesError();

    RankerParams params = init;
    params.train_state.seed = config.rng_seed;

    auto mean_full_loss = [&]() {
        double sum = 0.0;
        for (const auto& ex : examples) sum += loss_and_grad(params, as_pointers(ex.feats), 0, nullptr);
        return sum / static_cast<double>(examples.size());
    };
    if (report) {
        report->used_pairs = examples.size();
        report->skipped_pairs = skipped;
        report->epoch_mean_loss = {mean_full_loss()};
    }

    std::mt19937_64 rng(config.rng_seed);
    std::vector<size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    std::map<std::string, double> grad;
    for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t idx : order) {
            const Example& ex = examples[idx];
            std::vector<const FeatureVector*> view;
            view.push_back(&ex.feats[0]);
            size_t negs = ex.feats.size() - 1;
            if (negs > config.neg_cap) {
                std::vector<size_t> all_negs(negs);
                std::iota(all_negs.begin(), all_negs.end(), 1);
                std::vector<size_t> chosen;
                std::sample(all_negs.begin(), all_negs.end(), std::back_inserter(chosen),
                            config.neg_cap, rng);
                for (size_t i : chosen) view.push_back(&ex.feats[i]);
            } else {
                for (size_t i = 1; i < ex.feats.size(); ++i) view.push_back(&ex.feats[i]);
            }
            loss_and_grad(params, view, 0, &grad);
            for (const auto& [name, g] : grad) params.weights[name] -= config.lr * g;
            ++params.train_state.steps;
        }
        if (report) report->epoch_mean_loss.push_back(mean_full_loss());
    }
    return params;
}

std::vector<Prediction> predict(const RankerParams& params, const Question& question,
                                const KnowledgeBase& kb, size_t cap,
                                const FeaturizeOptions& opts) {
    CandidateSet cands = enumerate_candidates(question, kb, cap);
    std::vector<Prediction> out;
    out.reserve(cands.candidates.size());
    for (const auto& c : cands.candidates)
        out.push_back(Prediction{c, score(params, featurize(question, c, kb, opts))});
    std::stable_sort(out.begin(), out.end(), [](const Prediction& a, const Prediction& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.program.canonical < b.program.canonical;
    });
    return out;
}

double set_f1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
    std::set<std::string> p(predicted.begin(), predicted.end());
    std::set<std::string> g(gold.begin(), gold.end());
    if (p.empty() && g.empty()) return 1.0;
    size_t inter = 0;
    for (const auto& x : p) inter += g.count(x);
    if (inter == 0) return 0.0;
    double precision = static_cast<double>(inter) / static_cast<double>(p.size());
    double recall = static_cast<double>(inter) / static_cast<double>(g.size());
    return 2.0 * precision * recall / (precision + recall);
}

EvalResult evaluate(const RankerParams& params, const std::vector<DataPair>& pairs,
                    const KnowledgeBase& kb, size_t cap, const FeaturizeOptions& opts) {
    if (pairs.empty()) return {};
    double em_sum = 0.0, f1_sum = 0.0;
    for (const auto& pair : pairs) {
        try {
            Question q = link_entities(pair.question, kb);
            std::vector<Prediction> ranked = predict(params, q, kb, cap, opts);
            if (ranked.empty()) continue;
            const Program& top = ranked.front().program;
            if (top.canonical == pair.program.canonical) em_sum += 1.0;
            ExecutionResult result = execute(top, kb);
            f1_sum += set_f1(result.serialized(), pair.answers);
        } catch (const Error&) {
            // counts as 0 for both metrics
        }
    }
    double n = static_cast<double>(pairs.size());
    return EvalResult{em_sum / n, f1_sum / n};
}

void save_checkpoint(const RankerParams& params, const std::string& path) {
    nlohmann::ordered_json j;
    j["dim_note"] = "sparse linear scorer; one weight per named feature";
    j["features"] = nlohmann::ordered_json::object();
    for (const auto& [name, weight] : params.weights) j["features"][name] = weight;
    j["train_state"] = {{"seed", params.train_state.seed},
                        {"steps", params.train_state.steps}};
    std::ofstream out(path);
    if (!out) throw Error("cannot write checkpoint: " + path);
    out << j.dump(2) << "\n";
}

RankerParams load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read checkpoint: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed checkpoint " + path + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("features") || !j["features"].is_object() ||
        !j.contains("train_state") || !j["train_state"].is_object())
        throw Error("malformed checkpoint " + path);
    RankerParams params;
    for (const auto& [name, weight] : j["features"].items()) {
        if (!weight.is_number()) throw Error("non-numeric weight in checkpoint " + path);
        params.weights[name] = weight.get<double>();
    }
    const auto& ts = j["train_state"];
    if (ts.contains("seed")) params.train_state.seed = ts["seed"].get<uint64_t>();
    if (ts.contains("steps")) params.train_state.steps = ts["steps"].get<uint64_t>();
    return params;
}

}  // namespace flexqa
