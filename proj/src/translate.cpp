#include "flexqa/translate.hpp"

#include <atomic>
#include <map>
#include <thread>

#include "flexqa/errors.hpp"
#include "flexqa/execute.hpp"
#include "flexqa/sampler.hpp"
#include "flexqa/text.hpp"

namespace flexqa {

std::string default_instruction(Lang lang) {
    return lang == Lang::Sexpr
               ? "Convert the s-expressions to natural language questions."
               : "Convert the sparqls to natural language questions.";
}

TranslationProvider TranslationProvider::offline(const KnowledgeBase& kb) {
    TranslationProvider p;
    p.kind = Kind::OfflineVerbalizer;
    p.kb = &kb;
    return p;
}

TranslationProvider TranslationProvider::remote_chat(std::string endpoint, std::string model,
                                                     std::string api_key, RetryPolicy retry) {
    TranslationProvider p;
    p.kind = Kind::RemoteChat;
    p.endpoint = std::move(endpoint);
    p.model = std::move(model);
    p.api_key = std::move(api_key);
    p.retry = retry;
    return p;
}

namespace {

const char* lang_marker(Lang lang) {
    return lang == Lang::Sexpr ? "# s-expression:" : "# sparql:";
}

std::string surface_or_words(const std::string& id, const KnowledgeBase& kb) {
    if (auto name = kb.surface_name(id)) return *name;
    return verbalize_id(id);
}

const char* cmp_phrase(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "less than";
        case CmpOp::Le: return "at most";
        case CmpOp::Gt: return "greater than";
        case CmpOp::Ge: return "at least";
        case CmpOp::Ne: return "not";
    }
    return "less than";
}

// Noun phrase for a node; sentences are built at the root only.
std::string np(const SexprPtr& node, const KnowledgeBase& kb) {
    switch (node->kind) {
        case SexprNode::Kind::Entity:
            return surface_or_words(node->symbol, kb);
        case SexprNode::Kind::Class:
            return verbalize_id(node->symbol);
        case SexprNode::Kind::Join:
            if (node->reverse)
                return "the " + verbalize_id(node->symbol) + " of " + np(node->child, kb);
            return "the one whose " + verbalize_id(node->symbol) + " is " + np(node->child, kb);
        case SexprNode::Kind::And:
            if (node->child->kind == SexprNode::Kind::Class)
                return np(node->right, kb) + " that is a " + verbalize_id(node->child->symbol);
            return np(node->child, kb) + " that is also " + np(node->right, kb);
        case SexprNode::Kind::ArgMax:
        case SexprNode::Kind::ArgMin:
            return np(node->child, kb) +
                   (node->kind == SexprNode::Kind::ArgMax ? " with the largest "
                                                          : " with the smallest ") +
                   verbalize_id(node->symbol);
        case SexprNode::Kind::Cmp:
            return "the one whose " + verbalize_id(node->symbol) + " is " +
                   cmp_phrase(node->op) + " " + node->literal.lexical;
        case SexprNode::Kind::Count:
            return "the number of " + np(node->child, kb);
    }
    return "";
}

std::string strip_leading_the(std::string phrase) {
    if (phrase.rfind("the ", 0) == 0) phrase.erase(0, 4);
    return phrase;
}

std::string sexpr_sentence(const SexprPtr& node, const KnowledgeBase& kb) {
    switch (node->kind) {
        case SexprNode::Kind::Join:
            if (node->reverse)
                return "what is the " + verbalize_id(node->symbol) + " of " +
                       np(node->child, kb) + "?";
            return "what is the one whose " + verbalize_id(node->symbol) + " is " +
                   np(node->child, kb) + "?";
        case SexprNode::Kind::And:
            if (node->child->kind == SexprNode::Kind::Class)
                return "which " + verbalize_id(node->child->symbol) + " is " +
                       np(node->right, kb) + "?";
            return "what is both " + np(node->child, kb) + " and " + np(node->right, kb) + "?";
        case SexprNode::Kind::ArgMax:
        case SexprNode::Kind::ArgMin:
            return "which " + strip_leading_the(np(node->child, kb)) +
                   (node->kind == SexprNode::Kind::ArgMax ? " has the largest "
                                                          : " has the smallest ") +
                   verbalize_id(node->symbol) + "?";
        case SexprNode::Kind::Count:
            return "how many " + strip_leading_the(np(node->child, kb)) + "?";
        case SexprNode::Kind::Cmp:
            return "what has " + verbalize_id(node->symbol) + " " + cmp_phrase(node->op) +
                   " " + node->literal.lexical + "?";
        case SexprNode::Kind::Entity:
        case SexprNode::Kind::Class:
            return "what is " + np(node, kb) + "?";
    }
    return "";
}

std::string sparql_sentence(const SparqlQuery& q, const KnowledgeBase& kb) {
    std::vector<std::string> rels, ents;
    for (const auto& p : q.patterns) {
        if (!p.predicate.is_var && p.predicate.term.id != kTypePredicate)
            rels.push_back(verbalize_id(p.predicate.term.id));
        if (!p.subject.is_var && p.subject.term.is_entity())
            ents.push_back(surface_or_words(p.subject.term.id, kb));
        if (!p.object.is_var && p.object.term.is_entity())
            ents.push_back(surface_or_words(p.object.term.id, kb));
    }
    for (const auto& v : q.values)
        if (!v.value.is_var && v.value.term.is_entity())
            ents.push_back(surface_or_words(v.value.term.id, kb));
    std::string rel_part = join(rels, " and ");
    std::string ent_part = join(ents, " and ");
    if (rel_part.empty()) rel_part = "properties";
    if (ent_part.empty()) ent_part = "it";
    std::string out;
    switch (q.form) {
        case QueryForm::SelectCount:
            out = "how many " + rel_part + " of " + ent_part;
            break;
        case QueryForm::Ask:
            out = "is it true that " + ent_part + " has " + rel_part;
            break;
        case QueryForm::Select:
            out = "what is the " + rel_part + " of " + ent_part;
            break;
    }
    if (q.superlative)
        out += q.superlative->maximize ? " with the largest value" : " with the smallest value";
    return out + "?";
}

std::string first_line_answer(std::string text) {
    size_t begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) throw EmptyCompletionError();
    text.erase(0, begin);
    const std::string marker = "# question:";
    if (text.rfind(marker, 0) == 0) text.erase(0, marker.size());
    size_t eol = text.find('\n');
    if (eol != std::string::npos) text.erase(eol);
    size_t first = text.find_first_not_of(" \t\r");
    size_t last = text.find_last_not_of(" \t\r");
    if (first == std::string::npos) throw EmptyCompletionError();
    text = text.substr(first, last - first + 1);
    return text;
}

}  // namespace

std::string render_prompt(const PromptSpec& spec) {
    std::string out = "### " + spec.instruction + "\n";
    for (const auto& seed : spec.seeds) {
        out += "\n";
        out += lang_marker(seed.program.lang);
        out += seed.program.canonical;
        out += "\n# question:";
        out += seed.question;
        out += "\n";
    }
    out += "\n";
    out += lang_marker(spec.target.lang);
    out += spec.target.canonical;
    return out;
}

std::string verbalize_program(const Program& program, const KnowledgeBase& kb) {
    if (program.lang == Lang::Sexpr) return sexpr_sentence(program.sexpr, kb);
    return sparql_sentence(*program.sparql, kb);
}

std::string translate(const PromptSpec& spec, const TranslationProvider& provider) {
    if (provider.kind == TranslationProvider::Kind::OfflineVerbalizer) {
        if (!provider.kb) throw Error("offline translation provider needs a KB");
        std::string q = verbalize_program(spec.target, *provider.kb);
        if (q.empty()) throw EmptyCompletionError();
        return q;
    }
    nlohmann::json body{
        {"model", provider.model},
        {"messages",
         nlohmann::json::array({{{"role", "user"}, {"content", render_prompt(spec)}}})},
        {"temperature", provider.temperature}};
    nlohmann::json response = post_json(provider.endpoint, body, provider.api_key,
                                        provider.retry);
    if (!response.contains("choices") || !response["choices"].is_array() ||
        response["choices"].empty())
        throw ProviderError(0, "no choices in completion response");
    const auto& choice = response["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content"))
        throw ProviderError(0, "no message content in completion response");
    return first_line_answer(choice["message"]["content"].get<std::string>());
}

std::vector<SeedPair> select_prompt_seeds(const std::vector<SeedPair>& seeds, size_t limit) {
    std::vector<std::string> origin_order;
    std::map<std::string, std::vector<size_t>> by_origin;
    for (size_t i = 0; i < seeds.size(); ++i) {
        std::string origin = extract_template(seeds[i].program).ast.canonical;
        if (!by_origin.count(origin)) origin_order.push_back(origin);
        by_origin[origin].push_back(i);
    }
    std::vector<SeedPair> out;
    std::vector<size_t> cursor(origin_order.size(), 0);
    bool progressed = true;
    while (progressed && out.size() < limit) {
        progressed = false;
        for (size_t k = 0; k < origin_order.size() && out.size() < limit; ++k) {
            auto& queue = by_origin[origin_order[k]];
            if (cursor[k] < queue.size()) {
                out.push_back(seeds[queue[cursor[k]++]]);
                progressed = true;
            }
        }
    }
    return out;
}

std::vector<DataPair> translate_corpus(const std::vector<Program>& programs,
                                       const std::vector<SeedPair>& seeds,
                                       const TranslationProvider& provider,
                                       const KnowledgeBase& kb, size_t parallelism,
                                       TranslateReport* report) {
    std::vector<std::optional<DataPair>> slots(programs.size());
    std::atomic<size_t> next{0};
    std::atomic<size_t> dropped{0};
    std::atomic<size_t> provider_errors{0};

    auto work = [&]() {
        for (size_t i = next.fetch_add(1); i < programs.size(); i = next.fetch_add(1)) {
            try {
                PromptSpec spec{default_instruction(programs[i].lang), seeds, programs[i]};
                std::string question = translate(spec, provider);
                ExecutionResult result = execute(programs[i], kb);
                if (result.empty()) {
                    ++dropped;
                    continue;
                }
                slots[i] = DataPair{question, programs[i], result.serialized(),
                                    PairSource::Synthetic, {}};
            } catch (const ProviderError&) {
                ++dropped;
                ++provider_errors;
            } catch (const Error&) {
                ++dropped;
            }
        }
    };

    size_t workers = parallelism == 0 ? 1 : std::min(parallelism, programs.size());
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::vector<DataPair> out;
    for (auto& slot : slots)
        if (slot) out.push_back(std::move(*slot));
    if (report) {
        report->translated = out.size();
        report->dropped = dropped.load();
        report->provider_errors = provider_errors.load();
    }
    return out;
}

}  // namespace flexqa
