#pragma once
// The unit flowing through training and filtering: a question, its program,
// execution answers, and provenance. Persisted as JSONL, one object per line.

#include <optional>
#include <string>
#include <vector>

#include "flexqa/program.hpp"

namespace flexqa {

enum class PairSource { Seed, Synthetic, Pseudo };

const char* pair_source_name(PairSource source);
std::optional<PairSource> pair_source_from_name(const std::string& name);

struct DataPair {
    std::string question;
    Program program;
    std::vector<std::string> answers;  // serialized Terms
    PairSource source = PairSource::Synthetic;
    std::vector<std::string> kept_by;  // filter trace on pseudo pairs
};

// Single line, stable key order:
// {"question","program_text","program_lang","answers","source","kept_by"?}
std::string datapair_to_json(const DataPair& pair);

// Throws Error/ParseError when the schema or the program text is invalid.
DataPair datapair_from_json(const std::string& line);

std::vector<DataPair> load_datapairs(const std::string& path);
void save_datapairs(const std::string& path, const std::vector<DataPair>& pairs);

}  // namespace flexqa
