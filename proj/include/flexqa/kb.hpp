#pragma once
// Immutable, indexed triple store loaded from the tab-separated KB text
// format. Frozen after load; every other module only reads it.
//
// File format, one record per line, single-TAB separated:
//   <subject>\t<predicate>\t<object>     fact (object = id or quoted literal,
//                                        literal optionally ^^integer|double|date)
//   @name\t<entity>\t"<surface>"         surface-name declaration
//   # ...                                comment
// Objects of the reserved predicate "type.object.type" are class ids.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "flexqa/term.hpp"

namespace flexqa {

inline constexpr const char* kTypePredicate = "type.object.type";

struct Triple {
    std::string subject;    // EntityId
    std::string predicate;  // RelationId
    Term object;

    std::string key() const { return subject + "\x1e" + predicate + "\x1e" + object.key(); }
    bool operator==(const Triple& other) const { return key() == other.key(); }
    bool operator<(const Triple& other) const { return key() < other.key(); }
};

// Unset slots are wildcards.
struct MatchPattern {
    std::optional<std::string> subject;
    std::optional<std::string> predicate;
    std::optional<Term> object;
};

// One linked span produced by the shared surface matcher.
struct SurfaceMatch {
    std::string entity;
    std::string surface;    // normalized matched text
    size_t token_begin = 0; // position in the normalized token list
    size_t token_end = 0;   // one past the last matched token
};

class KnowledgeBase {
public:
    // load_kb. Throws MalformedLineError on wrong arity / bad literal / bad id;
    // duplicate @name declarations are tolerated (last wins, counted).
    static KnowledgeBase load(const std::string& path);
    static KnowledgeBase from_string(const std::string& contents);

    const std::vector<Triple>& triples() const { return triples_; }
    size_t size() const { return triples_.size(); }

    // Exactly the stored triples matching every specified slot, in canonical
    // (subject, predicate, object) order.
    std::vector<Triple> match(const MatchPattern& pattern) const;

    // Cheap upper-bound estimate used for join ordering.
    size_t match_count_estimate(const MatchPattern& pattern) const;

    // First declared surface name of an entity.
    std::optional<std::string> surface_name(const std::string& entity) const;

    // Entities whose normalized surface equals `normalized` (sorted by id).
    const std::vector<std::string>* entities_for_surface(const std::string& normalized) const;

    size_t max_surface_tokens() const { return max_surface_tokens_; }
    size_t duplicate_surface_count() const { return duplicate_surfaces_; }

    // Longest-match, non-overlapping, left-to-right scan of `text` against
    // the reverse surface index. Shared by entity linking and IR extraction.
    std::vector<SurfaceMatch> scan_surfaces(const std::string& text) const;

private:
    KnowledgeBase() = default;
    void add_triple(Triple t, size_t line_no);
    void add_surface(const std::string& entity, const std::string& surface);
    void freeze();

    std::vector<Triple> triples_;  // sorted, deduplicated after freeze
    std::unordered_map<std::string, std::vector<uint32_t>> by_subject_;
    std::unordered_map<std::string, std::vector<uint32_t>> by_predicate_;
    std::unordered_map<std::string, std::vector<uint32_t>> by_object_;
    std::unordered_map<std::string, std::vector<uint32_t>> by_sp_;
    std::unordered_map<std::string, std::vector<uint32_t>> by_po_;
    std::unordered_map<std::string, std::vector<std::string>> surface_names_;
    std::unordered_map<std::string, std::vector<std::string>> reverse_surfaces_;
    size_t max_surface_tokens_ = 0;
    size_t duplicate_surfaces_ = 0;
};

KnowledgeBase load_kb(const std::string& path);

}  // namespace flexqa
