#include "flexqa/datapair.hpp"

#include <fstream>

#include "flexqa/errors.hpp"
#include "json.hpp"

namespace flexqa {

const char* pair_source_name(PairSource source) {
    switch (source) {
        case PairSource::Seed: return "seed";
        case PairSource::Synthetic: return "synthetic";
        case PairSource::Pseudo: return "pseudo";
    }
    return "synthetic";
}

std::optional<PairSource> pair_source_from_name(const std::string& name) {
    if (name == "seed") return PairSource::Seed;
    if (name == "synthetic") return PairSource::Synthetic;
    if (name == "pseudo") return PairSource::Pseudo;
    return std::nullopt;
}

std::string datapair_to_json(const DataPair& pair) {
    nlohmann::ordered_json j;
    j["question"] = pair.question;
    j["program_text"] = pair.program.canonical;
    j["program_lang"] = lang_name(pair.program.lang);
    j["answers"] = pair.answers;
    j["source"] = pair_source_name(pair.source);
    if (!pair.kept_by.empty()) j["kept_by"] = pair.kept_by;
    return j.dump();
}

DataPair datapair_from_json(const std::string& line) {
    auto j = nlohmann::ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error("data pair: invalid JSON: " + line);
    for (const char* key : {"question", "program_text", "program_lang", "answers", "source"})
        if (!j.contains(key)) throw Error(std::string("data pair: missing field ") + key);
    DataPair pair;
    pair.question = j["question"].get<std::string>();
    auto lang = lang_from_name(j["program_lang"].get<std::string>());
    if (!lang) throw Error("data pair: unknown program_lang");
    pair.program = parse_program(j["program_text"].get<std::string>(), *lang);
    for (const auto& a : j["answers"]) pair.answers.push_back(a.get<std::string>());
    auto source = pair_source_from_name(j["source"].get<std::string>());
    if (!source) throw Error("data pair: unknown source");
    pair.source = *source;
    if (j.contains("kept_by"))
        for (const auto& f : j["kept_by"]) pair.kept_by.push_back(f.get<std::string>());
    return pair;
}

std::vector<DataPair> load_datapairs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::vector<DataPair> pairs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        pairs.push_back(datapair_from_json(line));
    }
    return pairs;
}

void save_datapairs(const std::string& path, const std::vector<DataPair>& pairs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    for (const auto& pair : pairs) out << datapair_to_json(pair) << '\n';
}

}  // namespace flexqa
