#pragma once
// Automatic program sampling: extract templates from seed programs, order
// their variables, and ground them step-wise against the KB into valid,
// deduplicated programs.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flexqa/execute.hpp"

namespace flexqa {

enum class VarKind { Entity, Relation, Class, Value };

const char* var_kind_name(VarKind kind);

// A program whose constants were replaced by ?entK / ?relK / ?valK variables.
// Entities are numbered before classes (which share the entK namespace);
// identical constants share a variable; the reserved type predicate stays.
struct ProgramTemplate {
    Program ast;
    std::map<std::string, VarKind> var_kinds;  // names without '?'
    std::string origin;                        // canonical text of the seed
};

// Grounding order: entity vars, then relation vars, then class vars, then
// value vars; within a kind, ascending by first occurrence.
struct GroundingPlan {
    std::vector<std::string> order;
};

struct SampleConfig {
    size_t max_programs = 1000;
    size_t per_step_fanout = 32;
    std::vector<std::string> seed_entities;  // topic entities; empty = no bias
    uint64_t rng_seed = 0;
    bool require_nonempty = true;
};

struct GroundStats {
    size_t step_exhausted = 0;  // branches abandoned: a step had no candidates
    size_t discarded = 0;       // fully bound programs failing validity checks
};

ProgramTemplate extract_template(const Program& program);

GroundingPlan plan_grounding(const ProgramTemplate& tmpl);

// Depth-first over the plan; each step executes the partially bound query
// projecting the next variable and keeps at most per_step_fanout candidates
// (uniform under rng_seed; entity steps intersect with seed_entities first).
// Emitted programs are fully bound and, with require_nonempty, execute with
// at least one answer.
std::vector<Program> ground(const ProgramTemplate& tmpl, const KnowledgeBase& kb,
                            const SampleConfig& config, GroundStats* stats = nullptr);

// Round-robin across templates, deduplicated by canonical text, truncated to
// max_programs. Throws EmptyCorpusError when nothing grounds.
std::vector<Program> sample_corpus(const std::vector<ProgramTemplate>& templates,
                                   const KnowledgeBase& kb, const SampleConfig& config);

}  // namespace flexqa
