#include "flexqa/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flexqa/errors.hpp"
#include "flexqa/text.hpp"
#include "json.hpp"

namespace flexqa {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return p;
    std::filesystem::path fp(p);
    if (fp.is_absolute()) return fp.lexically_normal().string();
    return (base / fp).lexically_normal().string();
}

std::set<FilterKind> parse_filter_set(const json& names) {
    std::set<FilterKind> out;
    for (const auto& n : names) {
        auto kind = filter_from_name(n.get<std::string>());
        if (!kind) throw Error("config: unknown filter name: " + n.get<std::string>());
        out.insert(*kind);
    }
    return out;
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
    std::string raw = read_file(path);
    PipelineConfig out;
    out.config_hash = fnv1a64(raw);
    out.filters_enabled = {FilterKind::Error, FilterKind::Semantic, FilterKind::Inherent,
                           FilterKind::Surface};
    std::filesystem::path base = std::filesystem::path(path).parent_path();

    json j;
    try {
        j = json::parse(raw);
    } catch (const json::exception& e) {
        throw Error(std::string("config: invalid JSON: ") + e.what());
    }

    try {
        if (!j.is_object()) throw Error("config: top level must be an object");
        if (!j.contains("rng_seed")) throw Error("config: rng_seed is required");
        out.rng_seed = j.at("rng_seed").get<uint64_t>();

        if (j.contains("lang")) {
            std::string name = j.at("lang").get<std::string>();
            auto lang = lang_from_name(name);
            if (!lang) throw Error("config: unknown lang: " + name);
            out.lang = *lang;
        }

        out.kb = resolve(base, j.value("kb", std::string{}));
        out.templates = resolve(base, j.value("templates", std::string{}));
        out.seed_pairs = resolve(base, j.value("seed_pairs", std::string{}));
        out.unlabeled = resolve(base, j.value("unlabeled", std::string{}));
        out.unlabeled_gold = resolve(base, j.value("unlabeled_gold", std::string{}));
        out.dev_pairs = resolve(base, j.value("dev_pairs", std::string{}));
        out.test_pairs = resolve(base, j.value("test_pairs", std::string{}));
        out.out_dir = resolve(base, j.value("out_dir", std::string{"."}));
        out.prompt_seed_limit = j.value("prompt_seed_limit", size_t{25});

        if (j.contains("sampler")) {
            const json& s = j.at("sampler");
            out.sampler.max_programs = s.value("max_programs", size_t{1000});
            out.sampler.per_step_fanout = s.value("per_step_fanout", size_t{32});
            if (s.contains("seed_entities"))
                out.sampler.seed_entities =
                    s.at("seed_entities").get<std::vector<std::string>>();
        }
        out.sampler.rng_seed = out.rng_seed;

        if (j.contains("train")) {
            const json& t = j.at("train");
            out.train.epochs = t.value("epochs", size_t{5});
            out.train.lr = t.value("lr", 0.1);
            out.train.neg_cap = t.value("neg_cap", size_t{64});
            out.train.enumeration_cap = t.value("enumeration_cap", size_t{128});
            out.use_embed_feature = t.value("use_embed_feature", true);
        }
        out.train.rng_seed = out.rng_seed;

        if (j.contains("filters")) {
            const json& f = j.at("filters");
            out.semantic_threshold = f.value("semantic_threshold", 0.2);
            if (f.contains("enabled")) out.filters_enabled = parse_filter_set(f.at("enabled"));
            if (f.contains("stages")) {
                std::vector<std::set<FilterKind>> stages;
                for (const auto& stage : f.at("stages")) stages.push_back(parse_filter_set(stage));
                out.pegst_stages = std::move(stages);
            }
        }

        if (j.contains("stop")) {
            const json& s = j.at("stop");
            out.stop.max_iters = s.value("max_iters", size_t{8});
            out.stop.min_f1_gain = s.value("min_f1_gain", 0.002);
        }

        if (j.contains("ir")) {
            const json& i = j.at("ir");
            out.ir_demos = resolve(base, i.value("demos", std::string{}));
            out.ir_stub = resolve(base, i.value("stub", std::string{}));
        }

        if (j.contains("provider")) {
            const json& p = j.at("provider");
            out.provider.llm_endpoint = p.value("llm_endpoint", std::string{});
            out.provider.llm_model = p.value("llm_model", std::string{});
            out.provider.llm_api_key = p.value("llm_api_key", std::string{});
            out.provider.embed_endpoint = p.value("embed_endpoint", std::string{});
            out.provider.embed_model = p.value("embed_model", std::string{});
            out.provider.embed_api_key = p.value("embed_api_key", std::string{});
            out.provider.parallelism = p.value("parallelism", size_t{1});
            out.provider.retry.max_attempts = p.value("retry_max_attempts", 3);
            out.provider.retry.backoff_ms = p.value("retry_backoff_ms", 50);
        }
    } catch (const json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    return out;
}

void apply_env_overrides(PipelineConfig& config) {
    if (const char* v = std::getenv("FLEX_LLM_ENDPOINT")) config.provider.llm_endpoint = v;
    if (const char* v = std::getenv("FLEX_LLM_API_KEY")) config.provider.llm_api_key = v;
    if (const char* v = std::getenv("FLEX_EMBED_ENDPOINT")) config.provider.embed_endpoint = v;
    if (const char* v = std::getenv("FLEX_EMBED_API_KEY")) config.provider.embed_api_key = v;
}

void write_manifest(const PipelineConfig& config, const std::string& command,
                    const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    char hash[19];
    std::snprintf(hash, sizeof(hash), "0x%016" PRIx64, config.config_hash);

    nlohmann::ordered_json m;
    m["command"] = command;
    m["config_hash"] = hash;
    m["rng_seed"] = config.rng_seed;
    m["format_version"] = 1;

    std::string path =
        (std::filesystem::path(out_dir) / (command + ".manifest.json")).string();
    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw Error("config: cannot write " + path);
    outf << m.dump(2) << "\n";
}

}  // namespace flexqa
