#include "flexqa/ir.hpp"

#include <fstream>
#include <set>

#include "flexqa/errors.hpp"
#include "flexqa/execute.hpp"
#include "json.hpp"

namespace flexqa {

std::vector<std::pair<std::string, std::string>> load_qa_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read qa file: " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedLineError(line_no, e.what());
        }
        if (!j.is_object() || !j.contains("question") || !j["question"].is_string() ||
            !j.contains("answer") || !j["answer"].is_string())
            throw MalformedLineError(line_no, "expected {\"question\", \"answer\"} strings");
        out.emplace_back(j["question"].get<std::string>(), j["answer"].get<std::string>());
    }
    return out;
}

std::vector<SurfaceMatch> extract_entities(const std::string& text, const KnowledgeBase& kb) {
    std::vector<SurfaceMatch> out;
    std::set<std::string> seen;
    for (auto& m : kb.scan_surfaces(text))
        if (seen.insert(m.entity).second) out.push_back(std::move(m));
    return out;
}

std::string render_ir_prompt(const IrConfig& config, const std::string& question) {
    std::string out;
    for (const auto& [q, a] : config.demos) {
        out += "# question:";
        out += q;
        out += "\n# answer:";
        out += a;
        out += "\n\n";
    }
    out += "# question:";
    out += question;
    out += "\n# answer:";
    return out;
}

DirectAnswer direct_answer(const std::string& question, const IrConfig& config,
                           const KnowledgeBase& kb) {
    DirectAnswer da;
    da.question = question;
    if (config.provider.kind == TranslationProvider::Kind::RemoteChat) {
        nlohmann::json body{
            {"model", config.provider.model},
            {"messages", nlohmann::json::array(
                             {{{"role", "user"}, {"content", render_ir_prompt(config, question)}}})},
            {"temperature", config.provider.temperature}};
        nlohmann::json response =
            post_json(config.provider.endpoint, body, config.provider.api_key,
                      config.provider.retry);
        if (!response.contains("choices") || !response["choices"].is_array() ||
            response["choices"].empty() || !response["choices"][0].contains("message") ||
            !response["choices"][0]["message"].contains("content"))
            throw ProviderError(0, "no message content in completion response");
        da.response_text = response["choices"][0]["message"]["content"].get<std::string>();
    } else {
        auto it = config.stub_responses.find(question);
        da.response_text = it != config.stub_responses.end() ? it->second : config.stub_default;
    }
    da.extracted = extract_entities(da.response_text, kb);
    return da;
}

FallbackAnswer fallback_answer(const std::string& question, const RankerParams& params,
                               const KnowledgeBase& kb, const IrConfig& config, size_t cap,
                               const FeaturizeOptions& opts) {
    try {
        Question q = link_entities(question, kb);
        std::vector<Prediction> ranked = predict(params, q, kb, cap, opts);
        if (!ranked.empty()) {
            ExecutionResult result = execute(ranked.front().program, kb);
            if (!result.empty())
                return FallbackAnswer{std::move(result.answers), FallbackAnswer::Mode::Parsed,
                                      ranked.front().program};
        }
    } catch (const NoTopicEntityError&) {
    } catch (const ExecutionError&) {
    }
    DirectAnswer da = direct_answer(question, config, kb);
    FallbackAnswer out;
    out.mode = FallbackAnswer::Mode::Fallback;
    for (const auto& m : da.extracted) out.answers.push_back(Term::entity(m.entity));
    return out;
}

EvalResult evaluate_fallback(const RankerParams& params, const std::vector<DataPair>& pairs,
                             const KnowledgeBase& kb, const IrConfig& config, size_t cap,
                             const FeaturizeOptions& opts) {
    EvalResult out;
    if (pairs.empty()) return out;
    for (const auto& pair : pairs) {
        FallbackAnswer fb = fallback_answer(pair.question, params, kb, config, cap, opts);
        if (fb.program && fb.program->canonical == pair.program.canonical) out.em += 1.0;
        std::vector<std::string> predicted;
        for (const auto& term : fb.answers) predicted.push_back(term.serialize());
        out.f1 += set_f1(predicted, pair.answers);
    }
    out.em /= static_cast<double>(pairs.size());
    out.f1 /= static_cast<double>(pairs.size());
    return out;
}

}  // namespace flexqa
