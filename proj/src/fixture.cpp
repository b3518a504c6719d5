#include "flexqa/fixture.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "flexqa/datapair.hpp"
#include "flexqa/errors.hpp"
#include "flexqa/execute.hpp"
#include "flexqa/kb.hpp"
#include "flexqa/sampler.hpp"
#include "flexqa/text.hpp"
#include "flexqa/translate.hpp"
#include "json.hpp"

namespace flexqa {

namespace {

// std::uniform_int_distribution is not pinned by the standard; raw draws are.
size_t pick(std::mt19937_64& rng, size_t n) { return static_cast<size_t>(rng() % n); }

bool chance(std::mt19937_64& rng, double p) {
    return static_cast<double>(rng() % 10000) < p * 10000.0;
}

template <typename T>
void fy_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(rng, i)]);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

// Relation catalog. The first six are structural; the numeric tail is
// optional per FixtureSpec::relations.
const char* kArtForms = "visual_art.visual_artist.art_forms";
const char* kPlaceOfBirth = "people.person.place_of_birth";
const char* kProfession = "people.person.profession";
const char* kBookAuthor = "book.written_work.author";
const char* kBookGenre = "book.written_work.genre";
const char* kCreatedBy = "visual_art.artwork.created_by";
const char* kYearOfBirth = "people.person.year_of_birth";
const char* kCopiesSold = "book.written_work.copies_sold";
const char* kPopulation = "location.citytown.population";
const char* kHeight = "people.person.height_meters";

const char* kClsPerson = "people.person";
const char* kClsArtist = "visual_art.visual_artist";
const char* kClsAuthor = "book.author";
const char* kClsBook = "book.written_work";
const char* kClsArtwork = "visual_art.artwork";
const char* kClsCity = "location.citytown";
const char* kClsArtForm = "visual_art.art_form";
const char* kClsGenre = "media_common.genre";
const char* kClsProfession = "people.profession";

const std::vector<std::string> kFirstNames = {
    "Mara",   "Teodor", "Ines",   "Ravi",   "Lotte",  "Bram",   "Sana",    "Milos",
    "Freya",  "Anton",  "Zelda",  "Kasper", "Noor",   "Viggo",  "Petra",   "Dario",
    "Selma",  "Ilias",  "Greta",  "Otto",   "Yara",   "Emil",   "Clara",   "Jonas",
    "Alba",   "Nils",   "Vera",   "Tomas",  "Ida",    "Marek",  "Lena",    "Oskar",
    "Runa",   "Felix",  "Edith",  "Hugo",   "Astrid", "Pavel",  "Sigrid",  "Lars",
    "Mirela", "Janek",  "Ester",  "Rolf",   "Tilda",  "Henrik", "Beatriz", "Casimir"};

const std::vector<std::string> kLastNames = {
    "Ellis",    "Varga",   "Holm",     "Castel",  "Brandt",  "Sorel",   "Lindqvist",
    "Moravec",  "Weiss",   "Okafor",   "Dunai",   "Ferrer",  "Stamm",   "Novak",
    "Alder",    "Reyes",   "Bergmann", "Kovacs",  "Marlow",  "Svoboda", "Ostrov",
    "Delacroi", "Hartmann", "Juhasz",  "Klee",    "Morven",  "Palka",   "Quist",
    "Rask",     "Sander",  "Toth",     "Ulven",   "Vidal",   "Wexler",  "Yaros",
    "Zettel",   "Abreu",   "Bondar",   "Cervenka", "Dvorak", "Eklund",  "Farkas",
    "Gruber",   "Havel",   "Istok",    "Jelinek", "Krog",    "Lanser"};

const std::vector<std::string> kTitleAdjectives = {
    "Quiet",  "Gilded",  "Broken",  "Silent", "Crimson", "Hollow", "Winding", "Pale",
    "Amber",  "Distant", "Shifting", "Frozen", "Velvet",  "Iron",   "Luminous", "Wild",
    "Hidden", "Copper",  "Restless", "Faded",  "Scarlet", "Granite", "Emerald", "Ashen",
    "Sable",  "Ivory",   "Obsidian", "Cobalt", "Umber",   "Vermilion"};

const std::vector<std::string> kTitleNouns = {
    "River",   "Harbor",  "Orchard",  "Lantern", "Meadow",  "Spire",   "Garden",  "Mirror",
    "Bridge",  "Tower",   "Valley",   "Window",  "Forest",  "Anchor",  "Compass", "Vessel",
    "Corridor", "Archway", "Fountain", "Quarry", "Terrace", "Harvest", "Voyage",  "Summit",
    "Shoreline", "Thicket", "Moor",    "Glacier", "Canyon",  "Estuary", "Paddock", "Atrium",
    "Bellfry",  "Cistern", "Dunes",   "Eaves",   "Furrow",  "Grotto",  "Hearth",  "Islet"};

const std::vector<std::string> kCityFirst = {
    "Arbor", "Brill",  "Calder", "Dovern", "Elmsar", "Farrow", "Galden", "Harwick",
    "Islen", "Jorvik", "Kelder", "Lunden", "Mirfield", "Norholt", "Oakmere", "Penrith",
    "Quarvel", "Rastel", "Selwick", "Tarnel"};

const std::vector<std::string> kCitySecond = {
    "Falls",  "Heath",  "Mills",  "Cross",  "Gate",   "Haven",  "Marsh", "Point",
    "Ridge",  "Sound",  "Vale",   "Wharf",  "Fields", "Hollow", "Spring", "Bluff",
    "Ford",   "Glen",   "Moor",   "Strand"};

const std::vector<std::string> kArtFormNames = {"painting",    "sculpture", "drawing",
                                                "printmaking", "photography", "ceramics",
                                                "mosaic",      "fresco"};

const std::vector<std::string> kGenreNames = {"mystery",   "fantasy", "romance",  "satire",
                                              "thriller",  "biography", "poetry",  "adventure",
                                              "folklore",  "tragedy", "comedy",   "memoir"};

const std::vector<std::string> kProfessionNames = {"painter", "sculptor", "novelist",
                                                   "poet",    "illustrator", "engraver"};

struct Domain {
    std::vector<std::string> artforms, genres, professions, cities, artists, writers,
        artworks, books;
    std::map<std::string, std::string> names;       // entity -> surface
    std::map<std::string, std::string> placeholder; // entity -> unlinkable stand-in
    std::string kb_text;
    size_t rel_count = 10;
};

void add_fact(Domain& d, const std::string& s, const std::string& p, const std::string& o) {
    d.kb_text += s + "\t" + p + "\t" + o + "\n";
}

void add_literal(Domain& d, const std::string& s, const std::string& p, const std::string& lex,
                 const char* dt) {
    d.kb_text += s + "\t" + p + "\t\"" + lex + "\"^^" + dt + "\n";
}

void add_entity(Domain& d, const std::string& id, const std::string& surface,
                const std::string& cls, const char* stand_in) {
    d.kb_text += "@name\t" + id + "\t\"" + surface + "\"\n";
    add_fact(d, id, kTypePredicate, cls);
    d.names[id] = surface;
    d.placeholder[id] = stand_in;
}

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

Domain build_domain(const FixtureSpec& spec) {
    Domain d;
    d.rel_count = std::clamp<size_t>(spec.relations, 6, 10);
    size_t cls_count = std::clamp<size_t>(spec.classes, 6, 9);
    bool has_yob = d.rel_count > 6, has_copies = d.rel_count > 7, has_pop = d.rel_count > 8,
         has_height = d.rel_count > 9;

    size_t cities = std::clamp<size_t>(spec.entities / 25, 8, 400);
    size_t fixed = kArtFormNames.size() + kGenreNames.size() + kProfessionNames.size();
    size_t rest = spec.entities > cities + fixed + 16 ? spec.entities - cities - fixed : 16;
    size_t artists = std::max<size_t>(4, rest * 22 / 100);
    size_t writers = std::max<size_t>(4, rest * 22 / 100);
    size_t artworks = std::max<size_t>(4, rest * 28 / 100);
    size_t books = std::max<size_t>(4, rest - artists - writers - artworks);

    std::mt19937_64 rng(spec.rng_seed);
    d.kb_text += "# toy benchmark knowledge base\n";

    for (size_t i = 0; i < kArtFormNames.size(); ++i) {
        std::string id = i == 0 ? "e:painting" : i == 1 ? "e:sculpture" : i == 2 ? "e:drawing"
                                                : "af:" + std::to_string(i);
        if (cls_count > 6)
            add_entity(d, id, kArtFormNames[i], kClsArtForm, "that craft");
        else {
            d.kb_text += "@name\t" + id + "\t\"" + kArtFormNames[i] + "\"\n";
            d.names[id] = kArtFormNames[i];
            d.placeholder[id] = "that craft";
        }
        d.artforms.push_back(id);
    }
    for (size_t i = 0; i < kGenreNames.size(); ++i) {
        std::string id = "g:" + std::to_string(i);
        if (cls_count > 7)
            add_entity(d, id, kGenreNames[i], kClsGenre, "that kind");
        else {
            d.kb_text += "@name\t" + id + "\t\"" + kGenreNames[i] + "\"\n";
            d.names[id] = kGenreNames[i];
            d.placeholder[id] = "that kind";
        }
        d.genres.push_back(id);
    }
    for (size_t i = 0; i < kProfessionNames.size(); ++i) {
        std::string id = "pr:" + std::to_string(i);
        if (cls_count > 8)
            add_entity(d, id, kProfessionNames[i], kClsProfession, "that trade");
        else {
            d.kb_text += "@name\t" + id + "\t\"" + kProfessionNames[i] + "\"\n";
            d.names[id] = kProfessionNames[i];
            d.placeholder[id] = "that trade";
        }
        d.professions.push_back(id);
    }
    for (size_t i = 0; i < cities; ++i) {
        std::string id = "c:" + std::to_string(i);
        std::string surface =
            kCityFirst[i % kCityFirst.size()] + " " + kCitySecond[(i / kCityFirst.size()) % kCitySecond.size()];
        add_entity(d, id, surface, kClsCity, "that place");
        if (has_pop) add_literal(d, id, kPopulation, std::to_string(10000 + rng() % 8990000), "integer");
        d.cities.push_back(id);
    }

    auto person_name = [&](size_t idx) {
        return kFirstNames[idx % kFirstNames.size()] + " " +
               kLastNames[(idx / kFirstNames.size()) % kLastNames.size()];
    };
    auto add_person_facts = [&](const std::string& id, bool anchor_davinci, bool anchor_warhol,
                                bool is_artist) {
        if (anchor_davinci) {
            add_fact(d, id, kArtForms, d.artforms[0]);
            add_fact(d, id, kArtForms, d.artforms[2]);
            add_fact(d, id, kPlaceOfBirth, d.cities[0]);
            add_fact(d, id, kProfession, d.professions[0]);
            if (has_yob) add_literal(d, id, kYearOfBirth, "1452", "integer");
            if (has_height) add_literal(d, id, kHeight, "1.74", "double");
            return;
        }
        if (anchor_warhol) {
            add_fact(d, id, kArtForms, d.artforms[0]);
            add_fact(d, id, kArtForms, d.artforms[3]);
            add_fact(d, id, kPlaceOfBirth, d.cities[1 % d.cities.size()]);
            add_fact(d, id, kProfession, d.professions[0]);
            if (has_yob) add_literal(d, id, kYearOfBirth, "1928", "integer");
            if (has_height) add_literal(d, id, kHeight, "1.80", "double");
            return;
        }
        if (is_artist) {
            size_t f1 = pick(rng, d.artforms.size());
            add_fact(d, id, kArtForms, d.artforms[f1]);
            if (chance(rng, 0.4))
                add_fact(d, id, kArtForms, d.artforms[(f1 + 1 + pick(rng, d.artforms.size() - 1)) % d.artforms.size()]);
        }
        add_fact(d, id, kPlaceOfBirth, d.cities[pick(rng, d.cities.size())]);
        size_t prof = is_artist ? (pick(rng, 2) == 0 ? 0 : 1) : 2 + pick(rng, 2);
        if (!is_artist && chance(rng, 0.2)) prof = 4;  // a few illustrator-writers
        add_fact(d, id, kProfession, d.professions[prof]);
        if (has_yob) add_literal(d, id, kYearOfBirth, std::to_string(1400 + rng() % 590), "integer");
        if (has_height && chance(rng, 0.7))
            add_literal(d, id, kHeight, two_decimals(1.50 + (rng() % 53) * 0.01), "double");
    };

    for (size_t i = 0; i < artists; ++i) {
        std::string id = i == 0 ? "m.04lg6" : i == 1 ? "m.0kc6" : "a:" + std::to_string(i);
        std::string surface = i == 0   ? "Leonardo da Vinci"
                              : i == 1 ? "Andy Warhol"
                                       : person_name(i);
        add_entity(d, id, surface, kClsPerson, "that person");
        add_fact(d, id, kTypePredicate, kClsArtist);
        add_person_facts(id, i == 0, i == 1, true);
        d.artists.push_back(id);
    }
    for (size_t i = 0; i < writers; ++i) {
        std::string id = "wr:" + std::to_string(i);
        add_entity(d, id, person_name(artists + i), kClsPerson, "that person");
        add_fact(d, id, kTypePredicate, kClsAuthor);
        add_person_facts(id, false, false, false);
        d.writers.push_back(id);
    }
    for (size_t i = 0; i < artworks; ++i) {
        std::string id = "w:" + std::to_string(i);
        std::string surface = "The " + kTitleAdjectives[i % kTitleAdjectives.size()] + " " +
                              kTitleNouns[(i / kTitleAdjectives.size()) % kTitleNouns.size()];
        add_entity(d, id, surface, kClsArtwork, "that work");
        std::string artist = i == 0   ? d.artists[0]
                             : i == 1 ? d.artists[1]
                                      : d.artists[pick(rng, d.artists.size())];
        add_fact(d, id, kCreatedBy, artist);
        d.artworks.push_back(id);
    }
    for (size_t i = 0; i < books; ++i) {
        std::string id = "b:" + std::to_string(i);
        std::string surface = "A " + kTitleAdjectives[(i + 7) % kTitleAdjectives.size()] + " " +
                              kTitleNouns[((i + 7) / kTitleAdjectives.size()) % kTitleNouns.size()];
        add_entity(d, id, surface, kClsBook, "that work");
        std::string writer = i == 0 ? d.writers[0] : d.writers[pick(rng, d.writers.size())];
        add_fact(d, id, kBookAuthor, writer);
        size_t g1 = pick(rng, d.genres.size());
        add_fact(d, id, kBookGenre, d.genres[g1]);
        if (chance(rng, 0.3))
            add_fact(d, id, kBookGenre,
                     d.genres[(g1 + 1 + pick(rng, d.genres.size() - 1)) % d.genres.size()]);
        if (has_copies)
            add_literal(d, id, kCopiesSold, std::to_string(1200 + rng() % 880000), "integer");
        d.books.push_back(id);
    }
    return d;
}

// Token dropout that never touches the first two tokens, the final token, or
// the topic mention.
std::string add_noise(const std::string& question, const std::string& surface, double rate,
                      std::mt19937_64& rng) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : question) {
        if (c == ' ') {
            if (!cur.empty()) tokens.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    if (tokens.size() <= 4) return question;

    size_t span_begin = tokens.size(), span_end = tokens.size();
    if (!surface.empty()) {
        size_t at = question.find(surface);
        if (at != std::string::npos) {
            size_t offset = 0;
            for (size_t i = 0; i < tokens.size(); ++i) {
                size_t tok_begin = question.find(tokens[i], offset);
                size_t tok_end = tok_begin + tokens[i].size();
                offset = tok_end;
                if (tok_end > at && tok_begin < at + surface.size()) {
                    span_begin = std::min(span_begin, i);
                    span_end = i + 1;
                }
            }
        }
    }
    std::vector<std::string> kept;
    for (size_t i = 0; i < tokens.size(); ++i) {
        bool prot = i < 2 || i + 1 == tokens.size() || (i >= span_begin && i < span_end);
        if (!prot && chance(rng, rate)) continue;
        kept.push_back(tokens[i]);
    }
    if (kept.size() < 4) return question;
    std::string out = kept[0];
    for (size_t i = 1; i < kept.size(); ++i) out += " " + kept[i];
    return out;
}

const SexprNode* first_entity(const SexprPtr& node) {
    switch (node->kind) {
        case SexprNode::Kind::Entity: return node.get();
        case SexprNode::Kind::Class: return nullptr;
        case SexprNode::Kind::Cmp: return nullptr;
        case SexprNode::Kind::And: {
            const SexprNode* l = first_entity(node->child);
            return l ? l : first_entity(node->right);
        }
        default: return node->child ? first_entity(node->child) : nullptr;
    }
}

std::string display_name(const std::string& serialized, const Domain& d) {
    std::optional<Term> term = parse_term(serialized);
    if (!term) return serialized;
    if (term->is_literal()) return term->lit.lexical;
    auto it = d.names.find(term->id);
    return it != d.names.end() ? it->second : term->id;
}

// A deliberately wrong but plausible response for the ~25% error share.
std::string wrong_answer(const std::vector<std::string>& gold, const Domain& d,
                         std::mt19937_64& rng) {
    std::optional<Term> term = gold.empty() ? std::nullopt : parse_term(gold[0]);
    if (term && term->is_literal() && term->lit.dt == Datatype::Integer)
        return std::to_string(std::stoll(term->lit.lexical) + 1);
    std::set<std::string> taken;
    for (const auto& s : gold) taken.insert(display_name(s, d));
    const std::vector<std::string>* pool = &d.artworks;
    if (term && term->is_entity()) {
        const std::string& id = term->id;
        if (d.names.count(id)) {
            char head = id[0];
            if (head == 'c') pool = &d.cities;
            else if (head == 'g') pool = &d.genres;
            else if (head == 'p' || head == 'e' || head == 'a') pool = &d.artforms;
            else if (head == 'w' && id[1] == 'r') pool = &d.writers;
            else if (head == 'b') pool = &d.books;
            else pool = &d.artists;
        }
    }
    for (size_t tries = 0; tries < pool->size(); ++tries) {
        const std::string& cand = (*pool)[pick(rng, pool->size())];
        auto it = d.names.find(cand);
        if (it != d.names.end() && !taken.count(it->second)) return it->second;
    }
    return "something else entirely";
}

std::string qa_line(const std::string& question, const std::string& answer) {
    nlohmann::ordered_json j;
    j["question"] = question;
    j["answer"] = answer;
    return j.dump() + "\n";
}

}  // namespace

FixturePaths gen_fixture(const FixtureSpec& spec, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    Domain d = build_domain(spec);
    write_text(path("kb.txt"), d.kb_text);
    KnowledgeBase kb = KnowledgeBase::from_string(d.kb_text);

    auto join1 = [](const std::string& rel, bool rev, const std::string& ent) {
        return sexpr_join(rel, rev, sexpr_entity(ent));
    };

    // 1-hop join exemplars; the labeled seed pairs keep these shapes.
    std::vector<Program> seed_templates = {
        make_program(join1(kArtForms, true, d.artists[0])),
        make_program(join1(kPlaceOfBirth, true, d.artists[1])),
        make_program(join1(kProfession, true, d.writers[0])),
        make_program(join1(kBookAuthor, false, d.writers[0])),
        make_program(join1(kBookGenre, true, d.books[0])),
        make_program(join1(kCreatedBy, false, d.artists[0])),
        make_program(join1(kBookAuthor, true, d.books[0])),
    };

    // Shapes the user questions draw from: counts, superlatives, two-hop
    // joins, one class constraint.
    std::vector<Program> user_templates;
    user_templates.push_back(make_program(sexpr_count(join1(kBookAuthor, false, d.writers[1]))));
    user_templates.push_back(
        make_program(sexpr_join(kBookGenre, true, join1(kBookAuthor, false, d.writers[1]))));
    if (d.rel_count > 7)
        user_templates.push_back(
            make_program(sexpr_arg(true, join1(kBookAuthor, false, d.writers[1]), kCopiesSold)));
    user_templates.push_back(
        make_program(sexpr_join(kPlaceOfBirth, true, join1(kCreatedBy, true, d.artworks[0]))));
    user_templates.push_back(make_program(
        sexpr_and(sexpr_class(kClsArtist), join1(kPlaceOfBirth, false, d.cities[0]))));
    if (d.rel_count > 6)
        user_templates.push_back(make_program(
            sexpr_arg(false, join1(kPlaceOfBirth, false, d.cities[0]), kYearOfBirth)));
    user_templates.push_back(make_program(sexpr_count(join1(kCreatedBy, false, d.artists[0]))));
    user_templates.push_back(
        make_program(sexpr_join(kProfession, true, join1(kBookAuthor, true, d.books[0]))));

    // The template file covers both inventories, so the sampled corpus spans
    // every operator the user questions use; what separates the synthetic
    // pairs from the user splits is the noisy phrasing, not the shapes.
    std::string templates_text;
    for (const auto& t : seed_templates) templates_text += t.canonical + "\n";
    for (const auto& t : user_templates) templates_text += t.canonical + "\n";
    write_text(path("templates.txt"), templates_text);

    std::vector<Program> pool;
    std::set<std::string> pool_seen;
    for (size_t u = 0; u < user_templates.size(); ++u) {
        SampleConfig sc;
        sc.max_programs = 40;
        sc.per_step_fanout = 64;
        sc.rng_seed = spec.rng_seed * 100 + u;
        for (auto& p : ground(extract_template(user_templates[u]), kb, sc))
            if (pool_seen.insert(p.canonical).second) pool.push_back(std::move(p));
    }

    std::mt19937_64 split_rng(spec.rng_seed ^ 0x5f3759df);
    fy_shuffle(pool, split_rng);
    size_t want_unlabeled = std::min<size_t>(100, pool.size() / 2);
    size_t want_dev = std::min<size_t>(50, pool.size() / 4);
    size_t want_test = std::min<size_t>(50, pool.size() / 4);

    std::mt19937_64 noise_rng(spec.rng_seed ^ 0x2545f491);
    std::set<std::string> question_seen;
    struct GoldItem {
        DataPair pair;
        bool unlinkable = false;
        std::string topic_id;
    };
    auto has_entity_answer = [](const std::vector<std::string>& answers) {
        for (const auto& a : answers) {
            std::optional<Term> term = parse_term(a);
            if (term && term->is_entity()) return true;
        }
        return false;
    };
    std::vector<GoldItem> unlabeled_items, dev_items, test_items;
    for (const auto& prog : pool) {
        if (unlabeled_items.size() >= want_unlabeled && dev_items.size() >= want_dev &&
            test_items.size() >= want_test)
            break;
        std::string question = verbalize_program(prog, kb);
        std::vector<std::string> answers = execute(prog, kb).serialized();
        const SexprNode* topic = first_entity(prog.sexpr);
        std::string topic_id = topic ? topic->symbol : "";
        std::string surface = d.names.count(topic_id) ? d.names.at(topic_id) : "";
        // Masking the topic only makes sense when the fallback path could
        // still recover something, i.e. the answers name KB entities.
        bool unlink = false;
        if (chance(noise_rng, spec.unlinkable_rate) && has_entity_answer(answers) &&
            !surface.empty()) {
            size_t at = question.find(surface);
            if (at != std::string::npos) {
                question = question.substr(0, at) + d.placeholder.at(topic_id) +
                           question.substr(at + surface.size());
                if (!kb.scan_surfaces(question).empty())
                    throw Error("fixture: unlinkable question still links: " + question);
                unlink = true;
            }
        }
        question = add_noise(question, unlink ? "" : surface, spec.noise_rate, noise_rng);
        if (!question_seen.insert(question).second) continue;

        GoldItem item;
        item.pair.question = question;
        item.pair.program = prog;
        item.pair.answers = std::move(answers);
        item.pair.source = PairSource::Seed;
        item.unlinkable = unlink;
        item.topic_id = topic_id;
        if (unlabeled_items.size() < want_unlabeled)
            unlabeled_items.push_back(std::move(item));
        else if (dev_items.size() < want_dev)
            dev_items.push_back(std::move(item));
        else if (test_items.size() < want_test)
            test_items.push_back(std::move(item));
    }

    // Dev and test each carry at least one masked-topic question so the
    // fallback path is exercised by evaluation.
    auto ensure_unlinkable = [&](std::vector<GoldItem>& items) {
        for (const auto& it : items)
            if (it.unlinkable) return;
        for (auto& it : items) {
            if (!d.names.count(it.topic_id) || !has_entity_answer(it.pair.answers)) continue;
            const std::string& surface = d.names.at(it.topic_id);
            size_t at = it.pair.question.find(surface);
            if (at == std::string::npos) continue;
            std::string candidate = it.pair.question.substr(0, at) +
                                    d.placeholder.at(it.topic_id) +
                                    it.pair.question.substr(at + surface.size());
            if (!kb.scan_surfaces(candidate).empty() || question_seen.count(candidate)) continue;
            question_seen.erase(it.pair.question);
            question_seen.insert(candidate);
            it.pair.question = candidate;
            it.unlinkable = true;
            return;
        }
    };
    ensure_unlinkable(dev_items);
    ensure_unlinkable(test_items);

    std::string unlabeled_text;
    std::vector<DataPair> unlabeled_gold, dev_pairs, test_pairs;
    for (const auto& it : unlabeled_items) {
        unlabeled_text += it.pair.question + "\n";
        unlabeled_gold.push_back(it.pair);
    }
    for (const auto& it : dev_items) dev_pairs.push_back(it.pair);
    for (const auto& it : test_items) test_pairs.push_back(it.pair);
    write_text(path("unlabeled.txt"), unlabeled_text);
    save_datapairs(path("unlabeled_gold.jsonl"), unlabeled_gold);
    save_datapairs(path("dev.jsonl"), dev_pairs);
    save_datapairs(path("test.jsonl"), test_pairs);

    // Labeled seed pairs: noise-free verbalizations keeping each template's
    // own relation, topics shuffled across the whole KB. Grounding through
    // the sampler would rebind the relation variable, which is wanted for the
    // synthetic corpus but not for the labeled set.
    struct SeedShape {
        const char* rel;
        bool reverse;
    };
    std::vector<SeedShape> shapes = {{kArtForms, true},   {kPlaceOfBirth, true},
                                     {kProfession, true}, {kBookAuthor, false},
                                     {kBookGenre, true},  {kCreatedBy, false},
                                     {kBookAuthor, true}};
    std::mt19937_64 seed_rng(spec.rng_seed ^ 0x8f14e45f);
    std::vector<std::vector<std::string>> topic_lists;
    for (const auto& shape : shapes) {
        std::set<std::string> uniq;
        MatchPattern pat;
        pat.predicate = shape.rel;
        for (const auto& t : kb.match(pat)) {
            if (shape.reverse)
                uniq.insert(t.subject);
            else if (t.object.is_entity())
                uniq.insert(t.object.id);
        }
        std::vector<std::string> topics(uniq.begin(), uniq.end());
        fy_shuffle(topics, seed_rng);
        topic_lists.push_back(std::move(topics));
    }
    std::vector<DataPair> seed_pairs;
    std::set<std::string> seed_seen;
    for (size_t round = 0; seed_pairs.size() < 25; ++round) {
        bool any = false;
        for (size_t s = 0; s < shapes.size() && seed_pairs.size() < 25; ++s) {
            if (round >= topic_lists[s].size()) continue;
            any = true;
            Program prog =
                make_program(join1(shapes[s].rel, shapes[s].reverse, topic_lists[s][round]));
            if (!seed_seen.insert(prog.canonical).second) continue;
            DataPair pair;
            pair.question = verbalize_program(prog, kb);
            pair.program = prog;
            pair.answers = execute(prog, kb).serialized();
            pair.source = PairSource::Seed;
            seed_pairs.push_back(std::move(pair));
        }
        if (!any) break;
    }
    save_datapairs(path("seeds.jsonl"), seed_pairs);

    // Direct-answer stub covering every user question, right ~75% of the
    // time.
    std::mt19937_64 stub_rng(spec.rng_seed ^ 0x94d049bb);
    std::string stub_text;
    auto stub_entry = [&](const DataPair& pair, bool force_correct) {
        bool correct = chance(stub_rng, 0.75) || force_correct;
        std::string body;
        if (correct) {
            size_t shown = std::min<size_t>(3, pair.answers.size());
            for (size_t i = 0; i < shown; ++i) {
                if (i) body += " and ";
                body += display_name(pair.answers[i], d);
            }
        } else {
            body = wrong_answer(pair.answers, d, stub_rng);
        }
        stub_text += qa_line(pair.question, "I think it is " + body + ".");
    };
    for (const auto& it : unlabeled_items) stub_entry(it.pair, it.unlinkable);
    for (const auto& it : dev_items) stub_entry(it.pair, it.unlinkable);
    for (const auto& it : test_items) stub_entry(it.pair, it.unlinkable);
    write_text(path("ir_stub.jsonl"), stub_text);

    std::string demos_text;
    demos_text += qa_line("what is the art forms of Leonardo da Vinci?", "I think it is painting.");
    demos_text += qa_line("what is the place of birth of Andy Warhol?",
                          "I think it is " + d.names.at(d.cities[1 % d.cities.size()]) + ".");
    demos_text += qa_line("what is the profession of " + d.names.at(d.writers[0]) + "?",
                          "I think it is " + d.names.at(d.professions[2]) + ".");
    write_text(path("ir_demos.jsonl"), demos_text);

    nlohmann::ordered_json cfg;
    cfg["rng_seed"] = spec.rng_seed;
    cfg["lang"] = "sexpr";
    cfg["kb"] = "kb.txt";
    cfg["templates"] = "templates.txt";
    cfg["seed_pairs"] = "seeds.jsonl";
    cfg["unlabeled"] = "unlabeled.txt";
    cfg["unlabeled_gold"] = "unlabeled_gold.jsonl";
    cfg["dev_pairs"] = "dev.jsonl";
    cfg["test_pairs"] = "test.jsonl";
    cfg["out_dir"] = ".";
    cfg["prompt_seed_limit"] = 25;
    cfg["sampler"] = {{"max_programs", 1000}, {"per_step_fanout", 128}};
    cfg["train"] = {{"epochs", 5},
                    {"lr", 0.5},
                    {"neg_cap", 64},
                    {"enumeration_cap", 128},
                    {"use_embed_feature", true}};
    cfg["filters"] = {{"semantic_threshold", 0.2},
                      {"enabled", {"error", "semantic", "inherent", "surface"}}};
    cfg["stop"] = {{"max_iters", 6}, {"min_f1_gain", 0.002}};
    cfg["ir"] = {{"demos", "ir_demos.jsonl"}, {"stub", "ir_stub.jsonl"}};
    write_text(path("config.json"), cfg.dump(2) + "\n");

    FixturePaths out;
    out.kb = path("kb.txt");
    out.templates = path("templates.txt");
    out.seeds = path("seeds.jsonl");
    out.unlabeled = path("unlabeled.txt");
    out.unlabeled_gold = path("unlabeled_gold.jsonl");
    out.dev = path("dev.jsonl");
    out.test = path("test.jsonl");
    out.ir_stub = path("ir_stub.jsonl");
    out.ir_demos = path("ir_demos.jsonl");
    out.config = path("config.json");
    return out;
}

}  // namespace flexqa
