#include "flexqa/egst.hpp"

#include <algorithm>
#include <fstream>

#include "flexqa/errors.hpp"
#include "flexqa/execute.hpp"
#include "flexqa/text.hpp"
#include "json.hpp"

namespace flexqa {

const char* filter_name(FilterKind kind) {
    switch (kind) {
        case FilterKind::Error: return "error";
        case FilterKind::Semantic: return "semantic";
        case FilterKind::Inherent: return "inherent";
        case FilterKind::Surface: return "surface";
    }
    return "error";
}

std::optional<FilterKind> filter_from_name(const std::string& name) {
    if (name == "error") return FilterKind::Error;
    if (name == "semantic") return FilterKind::Semantic;
    if (name == "inherent") return FilterKind::Inherent;
    if (name == "surface") return FilterKind::Surface;
    return std::nullopt;
}

std::vector<FilterKind> filter_chain_order() {
    return {FilterKind::Error, FilterKind::Semantic, FilterKind::Inherent, FilterKind::Surface};
}

namespace {

DataPair tagged(const DataPair& pair, FilterKind kind) {
    DataPair out = pair;
    const char* name = filter_name(kind);
    if (std::find(out.kept_by.begin(), out.kept_by.end(), name) == out.kept_by.end())
        out.kept_by.push_back(name);
    return out;
}

}  // namespace

std::string iteration_report_to_json(const IterationReport& report) {
    nlohmann::ordered_json j;
    j["stage"] = report.stage;
    j["iteration"] = report.iteration;
    j["produced"] = report.produced;
    j["dropped_unpredictable"] = report.dropped_unpredictable;
    j["kept_per_filter"] = nlohmann::ordered_json::object();
    for (const auto& [name, count] : report.kept_per_filter) j["kept_per_filter"][name] = count;
    j["kept"] = report.kept;
    j["dev_em"] = report.dev.em;
    j["dev_f1"] = report.dev.f1;
    if (report.pseudo_error_rate)
        j["pseudo_error_rate"] = *report.pseudo_error_rate;
    else
        j["pseudo_error_rate"] = nullptr;
    return j.dump();
}

void save_reports(const std::string& path, const std::vector<IterationReport>& reports) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write reports: " + path);
    for (const auto& r : reports) out << iteration_report_to_json(r) << "\n";
}

std::vector<DataPair> pseudo_label(const RankerParams& teacher,
                                   const std::vector<std::string>& unlabeled,
                                   const KnowledgeBase& kb, size_t cap,
                                   const FeaturizeOptions& opts, size_t* dropped) {
    std::vector<DataPair> out;
    size_t drop_count = 0;
    for (const auto& text : unlabeled) {
        try {
            Question q = link_entities(text, kb);
            std::vector<Prediction> ranked = predict(teacher, q, kb, cap, opts);
            if (ranked.empty()) {
                ++drop_count;
                continue;
            }
            DataPair pair;
            pair.question = text;
            pair.program = ranked.front().program;
            pair.source = PairSource::Pseudo;
            try {
                pair.answers = execute(pair.program, kb).serialized();
            } catch (const ExecutionError&) {
                pair.answers.clear();
            }
            out.push_back(std::move(pair));
        } catch (const NoTopicEntityError&) {
            ++drop_count;
        }
    }
    if (dropped) *dropped = drop_count;
    return out;
}

std::vector<DataPair> filter_error(const std::vector<DataPair>& pairs, const KnowledgeBase& kb) {
    std::vector<DataPair> out;
    for (const auto& pair : pairs) {
        try {
            if (execute(pair.program, kb).empty()) continue;
        } catch (const ExecutionError&) {
            continue;
        }
        out.push_back(tagged(pair, FilterKind::Error));
    }
    return out;
}

std::vector<DataPair> filter_semantic(const std::vector<DataPair>& pairs,
                                      const Embedder& embedder, double threshold) {
    std::vector<DataPair> out;
    for (const auto& pair : pairs) {
        std::vector<std::string> rels = program_relations(pair.program);
        double similarity = 0.0;
        if (!rels.empty()) {
            try {
                std::vector<double> q = embedder.embed(pair.question);
                double sum = 0.0;
                for (const auto& rel : rels) sum += cosine(q, embedder.embed(verbalize_id(rel)));
                similarity = sum / static_cast<double>(rels.size());
            } catch (const EmptyTextError&) {
                similarity = 0.0;
            }
        }
        if (similarity >= threshold) out.push_back(tagged(pair, FilterKind::Semantic));
    }
    return out;
}

std::vector<DataPair> filter_inherent(const std::vector<DataPair>& pairs,
                                      const std::map<std::string, DirectAnswer>& ir_answers,
                                      const KnowledgeBase& kb, size_t* missing) {
    std::vector<DataPair> out;
    size_t miss_count = 0;
    for (const auto& pair : pairs) {
        auto it = ir_answers.find(pair.question);
        if (it == ir_answers.end()) {
            ++miss_count;
            out.push_back(tagged(pair, FilterKind::Inherent));
            continue;
        }
        std::string response = normalize_text(it->second.response_text);
        bool aligned = false;
        for (const auto& serialized : pair.answers) {
            std::optional<Term> term = parse_term(serialized);
            if (!term) continue;
            std::string needle;
            if (term->is_entity()) {
                auto name = kb.surface_name(term->id);
                if (!name) continue;
                needle = normalize_text(*name);
            } else if (term->is_literal()) {
                needle = normalize_text(term->lit.lexical);
            }
            if (!needle.empty() && response.find(needle) != std::string::npos) {
                aligned = true;
                break;
            }
        }
        if (aligned) out.push_back(tagged(pair, FilterKind::Inherent));
    }
    if (missing) *missing = miss_count;
    return out;
}

std::vector<DataPair> filter_surface(const std::vector<DataPair>& pairs,
                                     const KnowledgeBase& kb) {
    std::vector<DataPair> out;
    for (const auto& pair : pairs) {
        bool retrievable = true;
        for (const auto& serialized : pair.answers) {
            std::optional<Term> term = parse_term(serialized);
            if (term && term->is_entity() && !kb.surface_name(term->id)) {
                retrievable = false;
                break;
            }
        }
        if (retrievable) out.push_back(tagged(pair, FilterKind::Surface));
    }
    return out;
}

SelfTrainResult self_train(const Corpora& corpora, const KnowledgeBase& kb,
                           const FilterConfig& filters, const TrainConfig& train_config,
                           const IrConfig* ir, const StopRule& stop,
                           const std::map<std::string, std::string>* oracle,
                           const RankerParams* initial_teacher) {
    std::vector<DataPair> base = corpora.seeds;
    base.insert(base.end(), corpora.synthetic.begin(), corpora.synthetic.end());

    RankerParams teacher = initial_teacher
                               ? *initial_teacher
                               : train(base, kb, train_config, RankerParams{});

    std::vector<IterationReport> reports;
    IterationReport baseline;
    baseline.dev = evaluate(teacher, corpora.dev, kb, train_config.enumeration_cap,
                            train_config.features);
    reports.push_back(baseline);
    double prev_f1 = baseline.dev.f1;

    // Direct responses do not depend on the teacher, so fetch them once.
    std::map<std::string, DirectAnswer> ir_answers;
    if (filters.enabled.count(FilterKind::Inherent) && ir)
        for (const auto& text : corpora.unlabeled)
            if (!ir_answers.count(text)) ir_answers.emplace(text, direct_answer(text, *ir, kb));

    Embedder local_embedder = Embedder::fallback();
    const Embedder& embedder = filters.embedder ? *filters.embedder : local_embedder;

    std::vector<DataPair> last_pseudo;
    for (size_t iter = 1; iter <= stop.max_iters; ++iter) {
        IterationReport rep;
        rep.iteration = iter;
        size_t dropped = 0;
        std::vector<DataPair> pseudo =
            pseudo_label(teacher, corpora.unlabeled, kb, train_config.enumeration_cap,
                         train_config.features, &dropped);
        rep.produced = pseudo.size();
        rep.dropped_unpredictable = dropped;
        if (oracle) {
            size_t considered = 0, wrong = 0;
            for (const auto& pair : pseudo) {
                auto it = oracle->find(pair.question);
                if (it == oracle->end()) continue;
                ++considered;
                if (pair.program.canonical != it->second) ++wrong;
            }
            if (considered)
                rep.pseudo_error_rate =
                    static_cast<double>(wrong) / static_cast<double>(considered);
        }

        for (FilterKind kind : filter_chain_order()) {
            if (!filters.enabled.count(kind)) continue;
            bool ran = true;
            switch (kind) {
                case FilterKind::Error:
                    pseudo = filter_error(pseudo, kb);
                    break;
                case FilterKind::Semantic:
                    try {
                        pseudo = filter_semantic(pseudo, embedder, filters.semantic_threshold);
                    } catch (const ProviderError&) {
                        if (!filters.semantic_skip_on_provider_error) throw;
                        ran = false;
                    }
                    break;
                case FilterKind::Inherent:
                    pseudo = filter_inherent(pseudo, ir_answers, kb);
                    break;
                case FilterKind::Surface:
                    pseudo = filter_surface(pseudo, kb);
                    break;
            }
            if (ran) rep.kept_per_filter.emplace_back(filter_name(kind), pseudo.size());
        }
        rep.kept = pseudo.size();

        std::vector<DataPair> all = base;
        all.insert(all.end(), pseudo.begin(), pseudo.end());
        RankerParams student = train(all, kb, train_config, RankerParams{});
        rep.dev = evaluate(student, corpora.dev, kb, train_config.enumeration_cap,
                           train_config.features);
        teacher = std::move(student);
        reports.push_back(rep);
        last_pseudo = std::move(pseudo);

        double gain = rep.dev.f1 - prev_f1;
        prev_f1 = rep.dev.f1;
        if (gain < stop.min_f1_gain) break;
    }
    return SelfTrainResult{std::move(teacher), std::move(reports), std::move(last_pseudo)};
}

std::vector<std::set<FilterKind>> default_pegst_stages() {
    return {{FilterKind::Error}, {FilterKind::Semantic}, {FilterKind::Surface}};
}

std::vector<FilterConfig> pegst_schedule(const std::vector<std::set<FilterKind>>& stages,
                                         const FilterConfig& base) {
    std::vector<FilterConfig> out;
    for (const auto& stage : stages) {
        FilterConfig fc = base;
        fc.enabled = stage;
        fc.pegst_stages.reset();
        out.push_back(std::move(fc));
    }
    return out;
}

SelfTrainResult pegst_self_train(const Corpora& corpora, const KnowledgeBase& kb,
                                 const FilterConfig& filters, const TrainConfig& train_config,
                                 const IrConfig* ir, const StopRule& stop,
                                 const std::map<std::string, std::string>* oracle) {
    std::vector<std::set<FilterKind>> stages =
        filters.pegst_stages ? *filters.pegst_stages : default_pegst_stages();
    if (stages.empty()) stages = default_pegst_stages();
    std::vector<FilterConfig> configs = pegst_schedule(stages, filters);

    SelfTrainResult acc;
    bool have_teacher = false;
    for (size_t s = 0; s < configs.size(); ++s) {
        SelfTrainResult r = self_train(corpora, kb, configs[s], train_config, ir, stop, oracle,
                                       have_teacher ? &acc.params : nullptr);
        acc.params = std::move(r.params);
        acc.last_pseudo = std::move(r.last_pseudo);
        have_teacher = true;
        for (auto& rep : r.reports) {
            rep.stage = s + 1;
            acc.reports.push_back(std::move(rep));
        }
    }
    return acc;
}

}  // namespace flexqa
