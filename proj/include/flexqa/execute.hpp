#pragma once
// Executor for both program languages over a frozen KnowledgeBase, plus the
// S-expression to SPARQL-subset converter. Execution is pure; many executions
// may run concurrently against the same KB.

#include <string>
#include <vector>

#include "flexqa/kb.hpp"
#include "flexqa/program.hpp"

namespace flexqa {

// Answer set after projection/aggregation. COUNT yields one integer literal;
// ASK yields one string literal "true" or "false".
struct ExecutionResult {
    std::vector<Term> answers;  // deduplicated, canonical order

    bool empty() const { return answers.empty(); }
    std::vector<std::string> serialized() const;
};

// Throws ExecutionError on an unbound projected/filter/superlative variable or
// a non-numeric / mixed-type comparison operand. ARGMAX/ARGMIN and the
// ORDER BY ... LIMIT 1 form keep the full tie set.
ExecutionResult execute(const Program& program, const KnowledgeBase& kb);

// Equivalent SPARQL-subset program: execution answers match direct
// S-expression evaluation on any KB. COUNT/ARGMAX/ARGMIN are encodable only
// at the root; elsewhere throws UnsupportedConstructError.
Program sexpr_to_sparql(const Program& program);

}  // namespace flexqa
