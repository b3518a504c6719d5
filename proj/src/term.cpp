#include "flexqa/term.hpp"

#include <cctype>
#include <cstdlib>
#include <cstring>

namespace flexqa {

const char* datatype_name(Datatype dt) {
    switch (dt) {
        case Datatype::String: return "string";
        case Datatype::Integer: return "integer";
        case Datatype::Double: return "double";
        case Datatype::Date: return "date";
    }
    return "string";
}

std::optional<Datatype> datatype_from_suffix(const std::string& suffix) {
    std::string s = suffix;
    const std::string uri_prefix = "http://www.w3.org/2001/XMLSchema#";
    if (s.rfind(uri_prefix, 0) == 0) s = s.substr(uri_prefix.size());
    if (s.rfind("xsd:", 0) == 0) s = s.substr(4);
    if (s == "string") return Datatype::String;
    if (s == "integer" || s == "int" || s == "long") return Datatype::Integer;
    if (s == "double" || s == "float" || s == "decimal") return Datatype::Double;
    if (s == "date" || s == "dateTime" || s == "gYear") return Datatype::Date;
    return std::nullopt;
}

bool literal_valid(const Literal& lit) {
    const std::string& s = lit.lexical;
    switch (lit.dt) {
        case Datatype::String:
            return true;
        case Datatype::Integer: {
            if (s.empty()) return false;
            size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
            if (i == s.size()) return false;
            for (; i < s.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
            return true;
        }
        case Datatype::Double: {
            if (s.empty()) return false;
            char* end = nullptr;
            std::strtod(s.c_str(), &end);
            return end && *end == '\0';
        }
        case Datatype::Date: {
            // YYYY or YYYY-MM-DD, digits only in the digit slots.
            auto digits = [&](size_t from, size_t n) {
                for (size_t i = from; i < from + n; ++i)
                    if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
                        return false;
                return true;
            };
            if (s.size() == 4) return digits(0, 4);
            if (s.size() == 10)
                return digits(0, 4) && s[4] == '-' && digits(5, 2) && s[7] == '-' && digits(8, 2);
            return false;
        }
    }
    return false;
}

Term Term::entity(std::string id) {
    Term t;
    t.kind = Kind::Entity;
    t.id = std::move(id);
    return t;
}

Term Term::cls(std::string id) {
    Term t;
    t.kind = Kind::Class;
    t.id = std::move(id);
    return t;
}

Term Term::literal(std::string lexical, Datatype dt) {
    Term t;
    t.kind = Kind::Literal;
    t.lit = Literal{std::move(lexical), dt};
    return t;
}

std::optional<double> Term::numeric() const {
    if (kind != Kind::Literal) return std::nullopt;
    if (lit.dt != Datatype::Integer && lit.dt != Datatype::Double) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(lit.lexical.c_str(), &end);
    if (!end || *end != '\0') return std::nullopt;
    return v;
}

std::string Term::serialize() const {
    if (kind == Kind::Literal) {
        std::string out = "\"" + lit.lexical + "\"";
        if (lit.dt != Datatype::String) {
            out += "^^";
            out += datatype_name(lit.dt);
        }
        return out;
    }
    return id;
}

std::string Term::key() const {
    switch (kind) {
        case Kind::Entity: return "e\x1f" + id;
        case Kind::Class: return "c\x1f" + id;
        case Kind::Literal:
            return std::string("l\x1f") + datatype_name(lit.dt) + "\x1f" + lit.lexical;
    }
    return {};
}

int Term::compare(const Term& other) const {
    // Matches key() order: the kind tag characters sort c < e < l, and no
    // datatype name is a prefix of another.
    auto tag = [](Kind k) { return k == Kind::Class ? 'c' : k == Kind::Entity ? 'e' : 'l'; };
    char a = tag(kind), b = tag(other.kind);
    if (a != b) return a < b ? -1 : 1;
    if (kind != Kind::Literal) return id.compare(other.id);
    int c = std::strcmp(datatype_name(lit.dt), datatype_name(other.lit.dt));
    if (c != 0) return c;
    return lit.lexical.compare(other.lit.lexical);
}

std::optional<Term> parse_term(const std::string& text, bool class_hint) {
    if (text.empty()) return std::nullopt;
    if (text[0] == '"') {
        size_t close = text.find('"', 1);
        if (close == std::string::npos) return std::nullopt;
        std::string lexical = text.substr(1, close - 1);
        std::string rest = text.substr(close + 1);
        Datatype dt = Datatype::String;
        if (!rest.empty()) {
            if (rest.rfind("^^", 0) != 0) return std::nullopt;
            auto parsed = datatype_from_suffix(rest.substr(2));
            if (!parsed) return std::nullopt;
            dt = *parsed;
        }
        Literal lit{lexical, dt};
        if (!literal_valid(lit)) return std::nullopt;
        return Term::literal(std::move(lexical), dt);
    }
    if (class_hint) return Term::cls(text);
    return Term::entity(text);
}

}  // namespace flexqa
