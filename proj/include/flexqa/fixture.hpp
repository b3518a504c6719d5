#pragma once
// Deterministic benchmark generator: a typed toy KB (people, artworks, books,
// genres, cities) with surface names, seed exemplar programs, labeled splits
// built from held-out templates through the offline verbalizer (token-dropout
// noise, a share of unlinkable questions), an imperfect direct-answer stub,
// and a ready-to-run pipeline config.

#include <cstdint>
#include <string>

namespace flexqa {

struct FixtureSpec {
    size_t entities = 1000;  // approximate total entity count
    size_t relations = 10;   // catalog prefix, clamped to [6, 10]
    size_t classes = 9;      // catalog prefix, clamped to [6, 9]
    uint64_t rng_seed = 7;
    double noise_rate = 0.12;       // per-token dropout on user questions
    double unlinkable_rate = 0.08;  // topic mention replaced by a placeholder
};

struct FixturePaths {
    std::string kb;
    std::string templates;       // seed exemplar programs, one per line
    std::string seeds;           // labeled pairs (D^f)
    std::string unlabeled;       // user question texts (D^u)
    std::string unlabeled_gold;  // oracle pairs for the unlabeled questions
    std::string dev;
    std::string test;
    std::string ir_stub;   // question -> direct response, ~75% correct
    std::string ir_demos;  // prompt demos
    std::string config;    // pipeline config pointing at the files above
};

// Writes the whole fixture into out_dir (created if needed). Identical spec
// gives byte-identical files. Throws Error on I/O failure.
FixturePaths gen_fixture(const FixtureSpec& spec, const std::string& out_dir);

}  // namespace flexqa
