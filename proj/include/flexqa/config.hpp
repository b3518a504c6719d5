#pragma once
// Pipeline configuration: one JSON file holding paths and knobs for every
// subcommand, environment overrides for provider credentials, and the
// manifest written next to each command's outputs.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flexqa/egst.hpp"
#include "flexqa/program.hpp"
#include "flexqa/ranker.hpp"
#include "flexqa/sampler.hpp"

namespace flexqa {

struct ProviderSettings {
    std::string llm_endpoint, llm_model, llm_api_key;
    std::string embed_endpoint, embed_model, embed_api_key;
    size_t parallelism = 1;
    RetryPolicy retry;

    bool llm_remote() const { return !llm_endpoint.empty(); }
    bool embed_remote() const { return !embed_endpoint.empty(); }
};

struct PipelineConfig {
    uint64_t rng_seed = 0;  // required in the file; no wall-clock fallback
    Lang lang = Lang::Sexpr;

    // Dataset paths, resolved relative to the config file's directory.
    std::string kb, templates, seed_pairs, unlabeled, unlabeled_gold, dev_pairs, test_pairs;
    std::string out_dir = ".";

    size_t prompt_seed_limit = 25;
    SampleConfig sampler;  // rng_seed mirrors the global seed
    TrainConfig train;     // rng_seed mirrors the global seed; features wired later
    bool use_embed_feature = true;

    double semantic_threshold = 0.2;
    std::set<FilterKind> filters_enabled;
    std::optional<std::vector<std::set<FilterKind>>> pegst_stages;
    StopRule stop;

    std::string ir_demos, ir_stub;
    ProviderSettings provider;

    uint64_t config_hash = 0;  // FNV-1a of the raw config bytes
};

// Parses and validates the file; unknown keys are ignored, a missing
// rng_seed is an Error. Relative paths resolve against the config location.
PipelineConfig load_config(const std::string& path);

// FLEX_LLM_ENDPOINT / FLEX_LLM_API_KEY / FLEX_EMBED_ENDPOINT /
// FLEX_EMBED_API_KEY, each applied only when the variable is set.
void apply_env_overrides(PipelineConfig& config);

// {command, config_hash, rng_seed, format_version} as
// <out_dir>/<command>.manifest.json. Deliberately free of timestamps.
void write_manifest(const PipelineConfig& config, const std::string& command,
                    const std::string& out_dir);

}  // namespace flexqa
