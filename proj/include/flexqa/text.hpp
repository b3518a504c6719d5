#pragma once
// Small text utilities: the shared surface-name normalization, tokenizing,
// relation verbalization, and a platform-stable FNV-1a hash.

#include <cstdint>
#include <string>
#include <vector>

namespace flexqa {

// Lowercase, punctuation stripped (replaced by spaces), whitespace collapsed.
// This is the single normalization used for surface names, question tokens,
// and IR response matching.
std::string normalize_text(const std::string& text);

// normalize_text then split on single spaces.
std::vector<std::string> tokenize(const std::string& text);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

// Splits a relation/class id into words: segments on '.'/':' with the leading
// domain segment dropped (when there is more than one), then '_' -> spaces.
// "visual_art.visual_artist.art_forms" -> "visual artist art forms"
// "r:art_forms" -> "art forms"
std::string verbalize_id(const std::string& id);

// 64-bit FNV-1a. Used wherever a hash must be identical across platforms and
// runs (embedding buckets, config hashes); std::hash is not.
uint64_t fnv1a64(const std::string& data);

// True if every char is non-whitespace (id validity check).
bool id_valid(const std::string& id);

}  // namespace flexqa
