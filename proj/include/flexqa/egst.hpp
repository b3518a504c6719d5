#pragma once
// Execution-guided self-training: the teacher-student loop, the four
// pseudo-pair filters (error, semantic, inherent, surface), and the staged
// progressive variant.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flexqa/datapair.hpp"
#include "flexqa/embed.hpp"
#include "flexqa/ir.hpp"
#include "flexqa/kb.hpp"
#include "flexqa/ranker.hpp"

namespace flexqa {

struct Corpora {
    std::vector<std::string> unlabeled;  // user question texts
    std::vector<DataPair> seeds;
    std::vector<DataPair> synthetic;
    std::vector<DataPair> dev;  // drives the convergence check
};

enum class FilterKind { Error, Semantic, Inherent, Surface };

const char* filter_name(FilterKind kind);
std::optional<FilterKind> filter_from_name(const std::string& name);

// The fixed chain order: cheapest and highest-precision first.
std::vector<FilterKind> filter_chain_order();

struct FilterConfig {
    double semantic_threshold = 0.2;  // in [-1, 1]
    std::set<FilterKind> enabled = {FilterKind::Error, FilterKind::Semantic,
                                    FilterKind::Inherent, FilterKind::Surface};
    std::optional<std::vector<std::set<FilterKind>>> pegst_stages;
    const Embedder* embedder = nullptr;  // semantic filter; null = local fallback
    bool semantic_skip_on_provider_error = false;
};

struct IterationReport {
    size_t stage = 0;
    size_t iteration = 0;  // 0 is the teacher-only baseline row
    size_t produced = 0;
    size_t dropped_unpredictable = 0;
    std::vector<std::pair<std::string, size_t>> kept_per_filter;  // chain order
    size_t kept = 0;  // pseudo pairs reaching the student
    EvalResult dev;
    std::optional<double> pseudo_error_rate;  // fixture runs with an oracle only
};

std::string iteration_report_to_json(const IterationReport& report);
void save_reports(const std::string& path, const std::vector<IterationReport>& reports);

// One pseudo pair per unlabeled question whose prediction succeeds: the top-1
// program plus its execution answers (empty when execution fails, so the
// error filter can judge it). Questions that cannot be predicted are dropped
// and counted.
std::vector<DataPair> pseudo_label(const RankerParams& teacher,
                                   const std::vector<std::string>& unlabeled,
                                   const KnowledgeBase& kb, size_t cap = 128,
                                   const FeaturizeOptions& opts = {},
                                   size_t* dropped = nullptr);

// Every filter preserves order, returns a subset, is idempotent, and appends
// its name to kept_by on the survivors (once).
std::vector<DataPair> filter_error(const std::vector<DataPair>& pairs, const KnowledgeBase& kb);

// Mean cosine between the question and each relation's verbalization.
std::vector<DataPair> filter_semantic(const std::vector<DataPair>& pairs,
                                      const Embedder& embedder, double threshold);

// Keeps a pair iff some predicted answer's surface name (entities) or lexical
// form (literals) appears in the normalized direct response. Pairs without an
// entry in ir_answers pass; `missing` counts them.
std::vector<DataPair> filter_inherent(const std::vector<DataPair>& pairs,
                                      const std::map<std::string, DirectAnswer>& ir_answers,
                                      const KnowledgeBase& kb, size_t* missing = nullptr);

// Keeps a pair iff every entity answer has a surface name in the KB.
std::vector<DataPair> filter_surface(const std::vector<DataPair>& pairs,
                                     const KnowledgeBase& kb);

struct StopRule {
    size_t max_iters = 8;
    double min_f1_gain = 0.002;
};

struct SelfTrainResult {
    RankerParams params;
    std::vector<IterationReport> reports;
    std::vector<DataPair> last_pseudo;  // surviving pairs of the final iteration
};

// The loop: teacher on seeds + synthetic (or `initial_teacher` when staging),
// then pseudo_label -> enabled filters in chain order -> student from zero
// weights on the union -> teacher <- student, until the dev F1 gain drops
// under stop.min_f1_gain or stop.max_iters. `ir` feeds the inherent filter;
// `oracle` (question -> gold canonical program) adds fixture error rates.
SelfTrainResult self_train(const Corpora& corpora, const KnowledgeBase& kb,
                           const FilterConfig& filters, const TrainConfig& train_config,
                           const IrConfig* ir, const StopRule& stop = {},
                           const std::map<std::string, std::string>* oracle = nullptr,
                           const RankerParams* initial_teacher = nullptr);

// Stage I error, stage II semantic, stage III surface.
std::vector<std::set<FilterKind>> default_pegst_stages();

// One FilterConfig per stage: `base` with enabled replaced and stages cleared.
std::vector<FilterConfig> pegst_schedule(const std::vector<std::set<FilterKind>>& stages,
                                         const FilterConfig& base = {});

// Runs each stage to its own convergence, carrying the teacher across stages.
// Stages come from filters.pegst_stages, defaulting to default_pegst_stages().
SelfTrainResult pegst_self_train(const Corpora& corpora, const KnowledgeBase& kb,
                                 const FilterConfig& filters, const TrainConfig& train_config,
                                 const IrConfig* ir, const StopRule& stop = {},
                                 const std::map<std::string, std::string>* oracle = nullptr);

}  // namespace flexqa
