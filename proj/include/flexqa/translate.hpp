#pragma once
// Program-to-question translation: prompt rendering in the published listing
// layout, a remote chat provider with retries, and the deterministic offline
// verbalizer that keeps tests network-free.

#include <cstddef>
#include <string>
#include <vector>

#include "flexqa/datapair.hpp"
#include "flexqa/kb.hpp"
#include "flexqa/provider.hpp"

namespace flexqa {

struct SeedPair {
    Program program;
    std::string question;
};

struct PromptSpec {
    std::string instruction;
    std::vector<SeedPair> seeds;  // N >= 0; N=0 is the zero-shot setting
    Program target;
};

// "Convert the s-expressions…" / "Convert the sparqls…" per target language.
std::string default_instruction(Lang lang);

struct TranslationProvider {
    enum class Kind { RemoteChat, OfflineVerbalizer };

    Kind kind = Kind::OfflineVerbalizer;
    std::string endpoint, model, api_key;
    double temperature = 0.0;
    RetryPolicy retry;
    const KnowledgeBase* kb = nullptr;  // offline: surface names for verbalization

    static TranslationProvider offline(const KnowledgeBase& kb);
    static TranslationProvider remote_chat(std::string endpoint, std::string model,
                                           std::string api_key, RetryPolicy retry = {});
};

// Exact layout: "### <instruction>", blank line, per seed
// "# s-expression:<prog>" newline "# question:<q>" blank line, terminating
// with the target marker line and no trailing question.
std::string render_prompt(const PromptSpec& spec);

// Deterministic rule-based question for a program; entity ids render via
// their KB surface names when declared.
std::string verbalize_program(const Program& program, const KnowledgeBase& kb);

// First line of the completion, after stripping an optional leading
// "# question:" marker. Throws ProviderError / EmptyCompletionError.
std::string translate(const PromptSpec& spec, const TranslationProvider& provider);

struct TranslateReport {
    size_t translated = 0;
    size_t dropped = 0;
    size_t provider_errors = 0;  // subset of dropped
};

// Reorders seeds so distinct template origins come first (round-robin over
// origins, ties by seed order), truncated to `limit`.
std::vector<SeedPair> select_prompt_seeds(const std::vector<SeedPair>& seeds, size_t limit);

// One synthetic DataPair per successful translation, in input order; failures
// and empty-executing programs are dropped and counted. Issues up to
// `parallelism` provider calls concurrently.
std::vector<DataPair> translate_corpus(const std::vector<Program>& programs,
                                       const std::vector<SeedPair>& seeds,
                                       const TranslationProvider& provider,
                                       const KnowledgeBase& kb, size_t parallelism = 1,
                                       TranslateReport* report = nullptr);

}  // namespace flexqa
