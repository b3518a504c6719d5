#pragma once
// The lightweight QA model: surface entity linking, bounded candidate-program
// enumeration from topic entities, a sparse linear scorer, the negative
// log-softmax ranking loss, SGD training, prediction, and EM/F1 metrics.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flexqa/datapair.hpp"
#include "flexqa/embed.hpp"
#include "flexqa/kb.hpp"
#include "flexqa/program.hpp"

namespace flexqa {

struct Question {
    std::string text;
    std::vector<std::string> tokens;   // normalize_text tokens
    std::vector<SurfaceMatch> linked;  // longest-match, non-overlapping, left to right
};

// Zero links is allowed; downstream enumeration is what reports it.
Question link_entities(const std::string& text, const KnowledgeBase& kb);

struct CandidateSet {
    Question question;
    std::vector<Program> candidates;  // deduplicated, ordered by (hops, canonical)
};

// From each linked entity: 1-hop joins in both directions, 2-hop joins
// thereof, class-constrained AND variants for classes observed among answers,
// COUNT wrappers, and ARGMAX/ARGMIN wrappers where a numeric-valued relation
// is adjacent to the answers. Every candidate executes non-empty; the list is
// truncated to `cap`. Throws NoTopicEntityError when nothing links.
CandidateSet enumerate_candidates(const Question& question, const KnowledgeBase& kb,
                                  size_t cap = 128);

using FeatureVector = std::map<std::string, double>;

struct FeaturizeOptions {
    const Embedder* embedder = nullptr;  // adds the embed_cos feature when set
};

FeatureVector featurize(const Question& question, const Program& program,
                        const KnowledgeBase& kb, const FeaturizeOptions& opts = {});

struct TrainState {
    uint64_t seed = 0;
    uint64_t steps = 0;
};

struct RankerParams {
    std::map<std::string, double> weights;
    TrainState train_state;
};

double score(const RankerParams& params, const FeatureVector& fv);

// Negative log-softmax of the candidate at gold_index against all of
// `features`, max-shifted for stability.
double ranker_loss(const RankerParams& params, const std::vector<FeatureVector>& features,
                   size_t gold_index);

// d ranker_loss / d weights as a sparse vector: sum_i p_i fv_i - fv_gold.
std::map<std::string, double> ranker_loss_grad(const RankerParams& params,
                                               const std::vector<FeatureVector>& features,
                                               size_t gold_index);

// Featurizes gold + candidates (injecting gold when absent) and delegates.
double ranker_loss(const RankerParams& params, const Question& question, const Program& gold,
                   const CandidateSet& candidates, const KnowledgeBase& kb,
                   const FeaturizeOptions& opts = {});

struct TrainConfig {
    size_t epochs = 5;
    double lr = 0.1;
    size_t neg_cap = 64;  // negatives resampled per visit when exceeded
    uint64_t rng_seed = 0;
    size_t enumeration_cap = 128;
    FeaturizeOptions features;
};

struct TrainReport {
    // Full-candidate mean loss over the usable pairs: entry 0 before any
    // update, then one entry after each epoch.
    std::vector<double> epoch_mean_loss;
    size_t used_pairs = 0;
    size_t skipped_pairs = 0;  // failed linking/enumeration
};

// Single-threaded, deterministic SGD from `init`. Throws
// NoTrainableExamplesError when every pair fails enumeration.
RankerParams train(const std::vector<DataPair>& pairs, const KnowledgeBase& kb,
                   const TrainConfig& config, const RankerParams& init,
                   TrainReport* report = nullptr);

struct Prediction {
    Program program;
    double score = 0.0;
};

// Candidates scored and sorted descending, ties by canonical string
// ascending. NoTopicEntityError propagates.
std::vector<Prediction> predict(const RankerParams& params, const Question& question,
                                const KnowledgeBase& kb, size_t cap = 128,
                                const FeaturizeOptions& opts = {});

struct EvalResult {
    double em = 0.0;
    double f1 = 0.0;
};

// EM: canonical equality of top-1 vs the pair's program. F1: mean per-question
// set-F1 of executed answers vs the pair's answers; failures count 0.
EvalResult evaluate(const RankerParams& params, const std::vector<DataPair>& pairs,
                    const KnowledgeBase& kb, size_t cap = 128,
                    const FeaturizeOptions& opts = {});

double set_f1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold);

// JSON checkpoint {dim_note, features, train_state{seed, steps}}, stable key
// order.
void save_checkpoint(const RankerParams& params, const std::string& path);
RankerParams load_checkpoint(const std::string& path);

}  // namespace flexqa
