#include "flexqa/text.hpp"

#include <cctype>
#include <sstream>

namespace flexqa {

std::string normalize_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        char mapped;
        if (std::isalnum(c)) {
            mapped = static_cast<char>(std::tolower(c));
        } else if (c >= 0x80) {
            mapped = static_cast<char>(c);  // UTF-8 bytes pass through
        } else {
            mapped = ' ';
        }
        if (mapped == ' ') {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(mapped);
        }
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(normalize_text(text));
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string verbalize_id(const std::string& id) {
    std::vector<std::string> segments;
    std::string cur;
    for (char c : id) {
        if (c == '.' || c == ':') {
            if (!cur.empty()) segments.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) segments.push_back(cur);
    if (segments.size() > 1) segments.erase(segments.begin());  // drop domain prefix
    std::string joined = join(segments, " ");
    for (char& c : joined)
        if (c == '_') c = ' ';
    return normalize_text(joined);
}

uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

bool id_valid(const std::string& id) {
    if (id.empty()) return false;
    for (unsigned char c : id)
        if (std::isspace(c)) return false;
    return true;
}

}  // namespace flexqa
