#include "flexqa/kb.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "flexqa/errors.hpp"
#include "flexqa/text.hpp"

namespace flexqa {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

// Indices of stored triples matching a pattern, using the tightest index.
const std::vector<uint32_t>* lookup(const std::unordered_map<std::string, std::vector<uint32_t>>& index,
                                    const std::string& key) {
    auto it = index.find(key);
    return it == index.end() ? nullptr : &it->second;
}

}  // namespace

KnowledgeBase KnowledgeBase::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open KB file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str());
}

KnowledgeBase KnowledgeBase::from_string(const std::string& contents) {
    KnowledgeBase kb;
    std::istringstream in(contents);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_tabs(line);
        if (fields.size() != 3)
            throw MalformedLineError(line_no, "3 tab-separated fields, got " +
                                                  std::to_string(fields.size()));
        if (fields[0] == "@name") {
            if (!id_valid(fields[1]))
                throw MalformedLineError(line_no, "invalid entity id in @name");
            auto surface = parse_term(fields[2]);
            if (!surface || !surface->is_literal() || surface->lit.dt != Datatype::String)
                throw MalformedLineError(line_no, "quoted surface string");
            kb.add_surface(fields[1], surface->lit.lexical);
            continue;
        }
        if (!id_valid(fields[0]))
            throw MalformedLineError(line_no, "non-empty whitespace-free subject id");
        if (!id_valid(fields[1]))
            throw MalformedLineError(line_no, "non-empty whitespace-free predicate id");
        bool class_hint = fields[1] == kTypePredicate;
        auto object = parse_term(fields[2], class_hint);
        if (!object)
            throw MalformedLineError(line_no, "object id or quoted literal");
        if (class_hint && !object->is_class())
            throw MalformedLineError(line_no, "class id object for " + std::string(kTypePredicate));
        if (!object->is_literal() && !id_valid(object->id))
            throw MalformedLineError(line_no, "non-empty whitespace-free object id");
        kb.add_triple(Triple{fields[0], fields[1], std::move(*object)}, line_no);
    }
    kb.freeze();
    return kb;
}

void KnowledgeBase::add_triple(Triple t, size_t) {
    triples_.push_back(std::move(t));
}

void KnowledgeBase::add_surface(const std::string& entity, const std::string& surface) {
    auto [it, inserted] = surface_names_.try_emplace(entity);
    if (!inserted) {
        ++duplicate_surfaces_;  // last wins
        it->second.clear();
    }
    it->second.push_back(surface);
}

void KnowledgeBase::freeze() {
    std::sort(triples_.begin(), triples_.end());
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());

    for (uint32_t i = 0; i < triples_.size(); ++i) {
        const Triple& t = triples_[i];
        by_subject_[t.subject].push_back(i);
        by_predicate_[t.predicate].push_back(i);
        by_object_[t.object.key()].push_back(i);
        by_sp_[t.subject + "\x1e" + t.predicate].push_back(i);
        by_po_[t.predicate + "\x1e" + t.object.key()].push_back(i);
    }

    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [entity, surfaces] : surface_names_)
        for (const auto& surface : surfaces)
            seen.emplace(normalize_text(surface), entity);
    for (const auto& [normalized, entity] : seen) {
        reverse_surfaces_[normalized].push_back(entity);
        max_surface_tokens_ = std::max(max_surface_tokens_, tokenize(normalized).size());
    }
}

std::vector<Triple> KnowledgeBase::match(const MatchPattern& p) const {
    const std::vector<uint32_t>* hits = nullptr;
    std::vector<uint32_t> all;
    if (p.subject && p.predicate) {
        hits = lookup(by_sp_, *p.subject + "\x1e" + *p.predicate);
    } else if (p.predicate && p.object) {
        hits = lookup(by_po_, *p.predicate + "\x1e" + p.object->key());
    } else if (p.subject) {
        hits = lookup(by_subject_, *p.subject);
    } else if (p.object) {
        hits = lookup(by_object_, p.object->key());
    } else if (p.predicate) {
        hits = lookup(by_predicate_, *p.predicate);
    } else {
        all.resize(triples_.size());
        for (uint32_t i = 0; i < triples_.size(); ++i) all[i] = i;
        hits = &all;
    }
    std::vector<Triple> out;
    if (!hits) return out;
    for (uint32_t i : *hits) {
        const Triple& t = triples_[i];
        if (p.subject && t.subject != *p.subject) continue;
        if (p.predicate && t.predicate != *p.predicate) continue;
        if (p.object && !(t.object == *p.object)) continue;
        out.push_back(t);
    }
    return out;  // index vectors are ascending, triples_ sorted -> canonical order
}

size_t KnowledgeBase::match_count_estimate(const MatchPattern& p) const {
    const std::vector<uint32_t>* hits = nullptr;
    if (p.subject && p.predicate) {
        hits = lookup(by_sp_, *p.subject + "\x1e" + *p.predicate);
    } else if (p.predicate && p.object) {
        hits = lookup(by_po_, *p.predicate + "\x1e" + p.object->key());
    } else if (p.subject) {
        hits = lookup(by_subject_, *p.subject);
    } else if (p.object) {
        hits = lookup(by_object_, p.object->key());
    } else if (p.predicate) {
        hits = lookup(by_predicate_, *p.predicate);
    } else {
        return triples_.size();
    }
    return hits ? hits->size() : 0;
}

std::optional<std::string> KnowledgeBase::surface_name(const std::string& entity) const {
    auto it = surface_names_.find(entity);
    if (it == surface_names_.end() || it->second.empty()) return std::nullopt;
    return it->second.front();
}

const std::vector<std::string>* KnowledgeBase::entities_for_surface(
    const std::string& normalized) const {
    auto it = reverse_surfaces_.find(normalized);
    return it == reverse_surfaces_.end() ? nullptr : &it->second;
}

std::vector<SurfaceMatch> KnowledgeBase::scan_surfaces(const std::string& text) const {
    std::vector<SurfaceMatch> matches;
    auto tokens = tokenize(text);
    size_t i = 0;
    while (i < tokens.size()) {
        size_t longest = 0;
        const std::vector<std::string>* found = nullptr;
        std::string found_surface;
        size_t max_len = std::min(max_surface_tokens_, tokens.size() - i);
        for (size_t len = max_len; len >= 1; --len) {
            std::string candidate = tokens[i];
            for (size_t k = 1; k < len; ++k) candidate += " " + tokens[i + k];
            if (const auto* entities = entities_for_surface(candidate)) {
                longest = len;
                found = entities;
                found_surface = candidate;
                break;
            }
        }
        if (found) {
            for (const auto& entity : *found)
                matches.push_back(SurfaceMatch{entity, found_surface, i, i + longest});
            i += longest;
        } else {
            ++i;
        }
    }
    return matches;
}

KnowledgeBase load_kb(const std::string& path) { return KnowledgeBase::load(path); }

}  // namespace flexqa
