#pragma once
// Inherent reasoning: direct question answering through the LLM provider (or
// an offline stub), surface-name answer extraction, and fallback answering
// when the parsed path produces nothing.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flexqa/kb.hpp"
#include "flexqa/ranker.hpp"
#include "flexqa/translate.hpp"

namespace flexqa {

struct DirectAnswer {
    std::string question;
    std::string response_text;                // verbatim provider/stub output
    std::vector<SurfaceMatch> extracted;      // entities named in the response
};

struct IrConfig {
    std::vector<std::pair<std::string, std::string>> demos;  // (question, answer)
    TranslationProvider provider;
    // Offline responses keyed by exact question text; stub_default is used
    // for questions missing from the map.
    std::map<std::string, std::string> stub_responses;
    std::string stub_default;
};

// JSONL {"question":..., "answer":...} per line; used for both demo pairs and
// the offline response stub.
std::vector<std::pair<std::string, std::string>> load_qa_jsonl(const std::string& path);

// Longest-match surface scan of arbitrary text; entities deduplicated in
// first-occurrence order.
std::vector<SurfaceMatch> extract_entities(const std::string& text, const KnowledgeBase& kb);

// Demos as "# question:"/"# answer:" blocks, ending with the target question
// and an open "# answer:" line.
std::string render_ir_prompt(const IrConfig& config, const std::string& question);

// Remote: POSTs the chat request and stores the completion verbatim.
// Offline: looks the question up in stub_responses. Entities are extracted
// from the response either way. Throws ProviderError after retries.
DirectAnswer direct_answer(const std::string& question, const IrConfig& config,
                           const KnowledgeBase& kb);

struct FallbackAnswer {
    enum class Mode { Parsed, Fallback };
    std::vector<Term> answers;
    Mode mode = Mode::Parsed;
    std::optional<Program> program;  // the executed prediction, parsed mode only
};

// predict + execute when possible; otherwise (no topic entity, execution
// error, or empty answers) the entities extracted from direct_answer.
FallbackAnswer fallback_answer(const std::string& question, const RankerParams& params,
                               const KnowledgeBase& kb, const IrConfig& config,
                               size_t cap = 128, const FeaturizeOptions& opts = {});

// evaluate() with the fallback path: answer F1 scores fallback_answer output;
// EM still requires a parsed-mode canonical match, so fallback answers can
// only raise F1.
EvalResult evaluate_fallback(const RankerParams& params, const std::vector<DataPair>& pairs,
                             const KnowledgeBase& kb, const IrConfig& config, size_t cap = 128,
                             const FeaturizeOptions& opts = {});

}  // namespace flexqa
