#pragma once
// Term: the object domain of the triple store. An object is an entity id, a
// class id, or a typed literal. Serialization is the canonical text form used
// by program text, the KB file, and answer sets alike.

#include <optional>
#include <string>

namespace flexqa {

enum class Datatype { String, Integer, Double, Date };

const char* datatype_name(Datatype dt);

// Short or long form: "integer", "xsd:integer", full XMLSchema URI,
// "float" normalizes to Double. Returns nullopt on unknown names.
std::optional<Datatype> datatype_from_suffix(const std::string& suffix);

struct Literal {
    std::string lexical;
    Datatype dt = Datatype::String;

    bool operator==(const Literal&) const = default;
};

// Validates the lexical form against the datatype (integers parse, doubles
// parse, dates look like YYYY or YYYY-MM-DD).
bool literal_valid(const Literal& lit);

struct Term {
    enum class Kind { Entity, Class, Literal };

    Kind kind = Kind::Entity;
    std::string id;  // Entity/Class
    Literal lit;     // Literal

    static Term entity(std::string id);
    static Term cls(std::string id);
    static Term literal(std::string lexical, Datatype dt);

    bool is_entity() const { return kind == Kind::Entity; }
    bool is_class() const { return kind == Kind::Class; }
    bool is_literal() const { return kind == Kind::Literal; }

    // Numeric value for Integer/Double literals; nullopt otherwise.
    std::optional<double> numeric() const;

    // Canonical text: bare id for entities/classes; quoted form for literals
    // ("lex" for strings, "lex"^^integer etc. for typed ones).
    std::string serialize() const;

    // Ordering/equality key; disambiguates kinds that share a spelling.
    std::string key() const;

    // Three-way comparison in key() order without building the key string;
    // answer sets order a lot of Terms, so this stays allocation-free.
    int compare(const Term& other) const;

    bool operator==(const Term& other) const { return compare(other) == 0; }
    bool operator<(const Term& other) const { return compare(other) < 0; }
};

// Inverse of serialize(). `class_hint` selects Class for bare ids (used when
// a slot is known to hold a class, e.g. objects of type.object.type).
// Returns nullopt on a malformed quoted literal or unknown datatype suffix.
std::optional<Term> parse_term(const std::string& text, bool class_hint = false);

}  // namespace flexqa
