// Command-line front end: sample / translate / train / egst / eval / answer /
// gen-fixture over one JSON config. Exit codes: 0 ok, 1 config or input
// error, 2 empty result, 3 provider failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flexqa/config.hpp"
#include "flexqa/egst.hpp"
#include "flexqa/errors.hpp"
#include "flexqa/execute.hpp"
#include "flexqa/fixture.hpp"
#include "flexqa/ir.hpp"
#include "flexqa/kb.hpp"
#include "flexqa/ranker.hpp"
#include "flexqa/sampler.hpp"
#include "flexqa/translate.hpp"
#include "json.hpp"

namespace {

using namespace flexqa;

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

std::string out_path(const PipelineConfig& cfg, const char* name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::string require_path(const std::string& path, const char* what) {
    if (path.empty()) throw Error(std::string("config: ") + what + " path not set");
    return path;
}

KnowledgeBase load_kb_for(const PipelineConfig& cfg) {
    return KnowledgeBase::load(require_path(cfg.kb, "kb"));
}

TranslationProvider make_llm(const PipelineConfig& cfg, const KnowledgeBase& kb) {
    if (cfg.provider.llm_remote())
        return TranslationProvider::remote_chat(cfg.provider.llm_endpoint, cfg.provider.llm_model,
                                                cfg.provider.llm_api_key, cfg.provider.retry);
    return TranslationProvider::offline(kb);
}

Embedder make_embedder(const PipelineConfig& cfg) {
    if (cfg.provider.embed_remote())
        return Embedder::remote(cfg.provider.embed_endpoint, cfg.provider.embed_model,
                                cfg.provider.embed_api_key, kDefaultEmbedDim,
                                cfg.provider.retry);
    return Embedder::fallback();
}

std::optional<IrConfig> make_ir(const PipelineConfig& cfg, const KnowledgeBase& kb) {
    if (cfg.ir_stub.empty() && cfg.ir_demos.empty() && !cfg.provider.llm_remote())
        return std::nullopt;
    IrConfig ir;
    ir.provider = make_llm(cfg, kb);
    if (!cfg.ir_demos.empty()) ir.demos = load_qa_jsonl(cfg.ir_demos);
    if (!cfg.ir_stub.empty())
        for (const auto& [q, a] : load_qa_jsonl(cfg.ir_stub)) ir.stub_responses[q] = a;
    return ir;
}

std::vector<ProgramTemplate> load_templates(const PipelineConfig& cfg) {
    std::vector<ProgramTemplate> out;
    for (const auto& line : read_lines(require_path(cfg.templates, "templates"))) {
        if (line[0] == '#') continue;
        out.push_back(extract_template(parse_program(line, cfg.lang)));
    }
    return out;
}

int cmd_sample(const PipelineConfig& cfg) {
    KnowledgeBase kb = load_kb_for(cfg);
    std::vector<Program> programs = sample_corpus(load_templates(cfg), kb, cfg.sampler);
    std::string body;
    for (const auto& p : programs) body += p.canonical + "\n";
    write_file(out_path(cfg, "programs.txt"), body);
    write_manifest(cfg, "sample", cfg.out_dir);
    std::cout << "sampled " << programs.size() << " programs\n";
    return 0;
}

int cmd_translate(const PipelineConfig& cfg) {
    KnowledgeBase kb = load_kb_for(cfg);
    std::vector<Program> programs;
    {
        std::ifstream probe(out_path(cfg, "programs.txt"));
        if (!probe) throw Error("cannot open " + out_path(cfg, "programs.txt") +
                                " (run `sample` first)");
    }
    std::ifstream in(out_path(cfg, "programs.txt"), std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) programs.push_back(parse_program(line, cfg.lang));
    }

    std::vector<SeedPair> seeds;
    for (const auto& pair : load_datapairs(require_path(cfg.seed_pairs, "seed_pairs")))
        seeds.push_back(SeedPair{pair.program, pair.question});
    std::vector<SeedPair> chosen = select_prompt_seeds(seeds, cfg.prompt_seed_limit);

    TranslationProvider provider = make_llm(cfg, kb);
    if (!programs.empty()) {
        PromptSpec spec{default_instruction(cfg.lang), chosen, programs.front()};
        write_file(out_path(cfg, "prompt_sample.txt"), render_prompt(spec) + "\n");
    }

    TranslateReport report;
    std::vector<DataPair> pairs = translate_corpus(programs, chosen, provider, kb,
                                                   cfg.provider.parallelism, &report);
    save_datapairs(out_path(cfg, "synthetic.jsonl"), pairs);
    write_manifest(cfg, "translate", cfg.out_dir);
    std::cout << "translated " << report.translated << " dropped " << report.dropped << "\n";
    if (!programs.empty() && pairs.empty() && report.provider_errors == report.dropped &&
        report.provider_errors > 0)
        return 3;
    return 0;
}

FeaturizeOptions wire_features(PipelineConfig& cfg, const Embedder& embedder) {
    FeaturizeOptions opts;
    if (cfg.use_embed_feature) opts.embedder = &embedder;
    cfg.train.features = opts;
    return opts;
}

int cmd_train(PipelineConfig& cfg) {
    KnowledgeBase kb = load_kb_for(cfg);
    Embedder embedder = make_embedder(cfg);
    wire_features(cfg, embedder);

    std::vector<DataPair> pairs = load_datapairs(require_path(cfg.seed_pairs, "seed_pairs"));
    std::string synthetic = out_path(cfg, "synthetic.jsonl");
    if (std::filesystem::exists(synthetic))
        for (auto& pair : load_datapairs(synthetic)) pairs.push_back(std::move(pair));

    TrainReport report;
    RankerParams params = train(pairs, kb, cfg.train, RankerParams{}, &report);
    save_checkpoint(params, out_path(cfg, "checkpoint.json"));
    write_manifest(cfg, "train", cfg.out_dir);
    std::cout << "trained on " << report.used_pairs << " pairs (skipped "
              << report.skipped_pairs << ")\n";
    return 0;
}

int cmd_egst(PipelineConfig& cfg, bool pegst) {
    KnowledgeBase kb = load_kb_for(cfg);
    Embedder embedder = make_embedder(cfg);
    wire_features(cfg, embedder);

    Corpora corpora;
    corpora.unlabeled = read_lines(require_path(cfg.unlabeled, "unlabeled"));
    corpora.seeds = load_datapairs(require_path(cfg.seed_pairs, "seed_pairs"));
    std::string synthetic = out_path(cfg, "synthetic.jsonl");
    if (std::filesystem::exists(synthetic)) corpora.synthetic = load_datapairs(synthetic);
    corpora.dev = load_datapairs(require_path(cfg.dev_pairs, "dev_pairs"));

    FilterConfig filters;
    filters.semantic_threshold = cfg.semantic_threshold;
    filters.enabled = cfg.filters_enabled;
    filters.pegst_stages = cfg.pegst_stages;
    filters.embedder = &embedder;

    std::optional<IrConfig> ir = make_ir(cfg, kb);
    std::map<std::string, std::string> oracle;
    if (!cfg.unlabeled_gold.empty())
        for (const auto& pair : load_datapairs(cfg.unlabeled_gold))
            oracle[pair.question] = pair.program.canonical;

    SelfTrainResult result =
        pegst ? pegst_self_train(corpora, kb, filters, cfg.train, ir ? &*ir : nullptr,
                                 cfg.stop, oracle.empty() ? nullptr : &oracle)
              : self_train(corpora, kb, filters, cfg.train, ir ? &*ir : nullptr, cfg.stop,
                           oracle.empty() ? nullptr : &oracle);

    save_checkpoint(result.params, out_path(cfg, "checkpoint.json"));
    save_reports(out_path(cfg, "reports.jsonl"), result.reports);
    save_datapairs(out_path(cfg, "pseudo.jsonl"), result.last_pseudo);
    write_manifest(cfg, pegst ? "egst-pegst" : "egst", cfg.out_dir);
    const IterationReport& last = result.reports.back();
    std::printf("egst done: %zu iterations, dev EM %.3f F1 %.3f\n",
                result.reports.size() - 1, last.dev.em, last.dev.f1);
    return 0;
}

int cmd_eval(PipelineConfig& cfg, const std::string& split, bool ir_fallback) {
    KnowledgeBase kb = load_kb_for(cfg);
    Embedder embedder = make_embedder(cfg);
    FeaturizeOptions opts = wire_features(cfg, embedder);

    const std::string& path = split == "dev" ? cfg.dev_pairs : cfg.test_pairs;
    std::vector<DataPair> pairs =
        load_datapairs(require_path(path, split == "dev" ? "dev_pairs" : "test_pairs"));
    RankerParams params = load_checkpoint(out_path(cfg, "checkpoint.json"));

    EvalResult res;
    if (ir_fallback) {
        std::optional<IrConfig> ir = make_ir(cfg, kb);
        if (!ir) throw Error("config: --ir-fallback needs ir.stub/ir.demos or a remote provider");
        res = evaluate_fallback(params, pairs, kb, *ir, cfg.train.enumeration_cap, opts);
    } else {
        res = evaluate(params, pairs, kb, cfg.train.enumeration_cap, opts);
    }

    nlohmann::ordered_json j;
    j["split"] = split;
    j["ir_fallback"] = ir_fallback;
    char em[16], f1[16];
    std::snprintf(em, sizeof(em), "%.3f", res.em);
    std::snprintf(f1, sizeof(f1), "%.3f", res.f1);
    j["em"] = em;
    j["f1"] = f1;
    write_file(out_path(cfg, "eval.json"), j.dump(2) + "\n");
    write_manifest(cfg, "eval", cfg.out_dir);
    std::printf("EM %.3f F1 %.3f\n", res.em, res.f1);
    return 0;
}

int cmd_answer(PipelineConfig& cfg, const std::string& question, bool ir_fallback) {
    KnowledgeBase kb = load_kb_for(cfg);
    Embedder embedder = make_embedder(cfg);
    FeaturizeOptions opts = wire_features(cfg, embedder);
    RankerParams params = load_checkpoint(out_path(cfg, "checkpoint.json"));

    if (ir_fallback) {
        std::optional<IrConfig> ir = make_ir(cfg, kb);
        if (!ir) throw Error("config: --ir-fallback needs ir.stub/ir.demos or a remote provider");
        FallbackAnswer fb =
            fallback_answer(question, params, kb, *ir, cfg.train.enumeration_cap, opts);
        std::cout << "mode=" << (fb.mode == FallbackAnswer::Mode::Parsed ? "parsed" : "fallback")
                  << "\n";
        if (fb.program) std::cout << "program " << fb.program->canonical << "\n";
        for (const auto& term : fb.answers) std::cout << term.serialize() << "\n";
        return fb.answers.empty() ? 2 : 0;
    }

    Question q = link_entities(question, kb);
    std::vector<Prediction> ranked = predict(params, q, kb, cfg.train.enumeration_cap, opts);
    if (ranked.empty()) return 2;
    ExecutionResult result = execute(ranked.front().program, kb);
    std::cout << "mode=parsed\nprogram " << ranked.front().program.canonical << "\n";
    for (const auto& answer : result.serialized()) std::cout << answer << "\n";
    return result.empty() ? 2 : 0;
}

int cmd_gen_fixture(const FixtureSpec& spec, const std::string& out_dir) {
    FixturePaths paths = gen_fixture(spec, out_dir);

    nlohmann::ordered_json m;
    m["command"] = "gen-fixture";
    m["entities"] = spec.entities;
    m["relations"] = spec.relations;
    m["classes"] = spec.classes;
    m["rng_seed"] = spec.rng_seed;
    m["noise_rate"] = spec.noise_rate;
    m["unlinkable_rate"] = spec.unlinkable_rate;
    m["format_version"] = 1;
    write_file((std::filesystem::path(out_dir) / "gen-fixture.manifest.json").string(),
               m.dump(2) + "\n");
    std::cout << "fixture written to " << out_dir << "\n"
              << "config " << paths.config << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"KBQA pipeline: program sampling, LLM translation, ranking, self-training"};
    app.require_subcommand(1);
    app.fallthrough();  // global --config/--seed/--out may follow the subcommand

    std::string config_path, out_override;
    uint64_t seed_override = 0;
    app.add_option("--config", config_path, "pipeline config JSON")->expected(1);
    CLI::Option* seed_opt = app.add_option("--seed", seed_override, "override rng_seed");
    app.add_option("--out", out_override, "override output directory");

    CLI::App* sample = app.add_subcommand("sample", "ground templates into programs");
    CLI::App* translate = app.add_subcommand("translate", "programs -> questions");
    CLI::App* train = app.add_subcommand("train", "fit the ranker on seed+synthetic pairs");
    CLI::App* egst = app.add_subcommand("egst", "execution-guided self-training");
    bool pegst = false;
    egst->add_flag("--pegst", pegst, "progressive staged filter schedule");
    CLI::App* eval = app.add_subcommand("eval", "EM/F1 on a split");
    std::string split = "test";
    bool eval_ir = false;
    eval->add_option("--split", split, "dev or test")->check(CLI::IsMember({"dev", "test"}));
    eval->add_flag("--ir-fallback", eval_ir, "use direct answering when parsing fails");
    CLI::App* answer = app.add_subcommand("answer", "answer one question");
    std::string question;
    bool answer_ir = false;
    answer->add_option("question", question, "question text")->required();
    answer->add_flag("--ir-fallback", answer_ir, "use direct answering when parsing fails");
    CLI::App* genfix = app.add_subcommand("gen-fixture", "synthesize the toy benchmark");
    FixtureSpec fixture_spec;
    genfix->add_option("--entities", fixture_spec.entities, "entity count");
    genfix->add_option("--relations", fixture_spec.relations, "relation count (6..10)");
    genfix->add_option("--classes", fixture_spec.classes, "class count (6..9)");
    genfix->add_option("--noise-rate", fixture_spec.noise_rate, "token dropout rate");
    genfix->add_option("--unlinkable-rate", fixture_spec.unlinkable_rate,
                       "share of questions with masked topic entity");

    CLI11_PARSE(app, argc, argv);
    bool have_seed = seed_opt->count() > 0;

    try {
        if (genfix->parsed()) {
            if (have_seed) fixture_spec.rng_seed = seed_override;
            if (out_override.empty()) throw Error("gen-fixture needs --out");
            return cmd_gen_fixture(fixture_spec, out_override);
        }

        if (config_path.empty()) throw Error("--config is required");
        PipelineConfig cfg = load_config(config_path);
        apply_env_overrides(cfg);
        if (have_seed) {
            cfg.rng_seed = seed_override;
            cfg.sampler.rng_seed = seed_override;
            cfg.train.rng_seed = seed_override;
        }
        if (!out_override.empty()) cfg.out_dir = out_override;

        if (sample->parsed()) return cmd_sample(cfg);
        if (translate->parsed()) return cmd_translate(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (egst->parsed()) return cmd_egst(cfg, pegst);
        if (eval->parsed()) return cmd_eval(cfg, split, eval_ir);
        if (answer->parsed()) return cmd_answer(cfg, question, answer_ir);
        throw Error("no subcommand");
    } catch (const ProviderError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const EmptyCorpusError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NoTrainableExamplesError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NoTopicEntityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
