#include "sft/json_io.hpp"

#include <algorithm>

namespace sft::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw input_error(what); }

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        fail(std::string("missing field \"") + key + "\"");
    return *it;
}

std::string one_letter(const json& j, const char* what) {
    if (!j.is_string() || j.get<std::string>().size() != 1)
        fail(std::string(what) + " must be a single-letter string");
    return j.get<std::string>();
}

Word word_of(const json& j) {
    if (!j.is_string())
        fail("words must be strings");
    return Word(j.get<std::string>());
}

std::vector<Word> word_list(const json& j) {
    std::vector<Word> out;
    if (!j.is_array())
        fail("expected an array of words");
    for (const auto& e : j)
        out.push_back(word_of(e));
    return out;
}

std::vector<std::string> string_list(const json& j) {
    std::vector<std::string> out;
    if (!j.is_array())
        fail("expected an array of strings");
    for (const auto& e : j) {
        if (!e.is_string())
            fail("expected an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

} // namespace

void require_spec(const json& doc) {
    if (!doc.is_object())
        fail("input document must be a JSON object");
    auto it = doc.find("spec");
    if (it == doc.end() || !it->is_number_integer() || it->get<int>() != 1)
        fail("input document must declare \"spec\": 1");
}

// ---------------------------------------------------------------------------
// groups

json group_to_json(const Group& g) {
    json j;
    switch (g.kind()) {
    case Group::Kind::free: {
        j["kind"] = "free";
        json gens = json::array();
        json inverses = json::object();
        const GeneratorSet& gs = g.generators();
        for (int i = 0; i < gs.size(); ++i) {
            char c = gs.letter(i);
            char ci = gs.inverse(c);
            if (gs.index_of(ci) < i)
                continue;
            gens.push_back(std::string(1, c));
            char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (ci != upper)
                inverses[std::string(1, c)] = std::string(1, ci);
        }
        j["generators"] = gens;
        if (!inverses.empty())
            j["inverses"] = inverses;
        break;
    }
    case Group::Kind::free_abelian:
        j["kind"] = "free_abelian";
        j["rank"] = g.rank();
        break;
    case Group::Kind::finite: {
        j["kind"] = "finite";
        j["elements"] = g.element_names();
        json table = json::array();
        for (int a = 0; a < g.element_count(); ++a) {
            json row = json::array();
            for (int b = 0; b < g.element_count(); ++b)
                row.push_back(g.element_of(
                    Word(g.element_word(a).letters + g.element_word(b).letters)));
            table.push_back(row);
        }
        j["table"] = table;
        // ordered array, since the letter order is part of the group
        json gens = json::array();
        const GeneratorSet& gs = g.generators();
        for (int i = 0; i < gs.size(); ++i)
            gens.push_back(json::array(
                {std::string(1, gs.letter(i)), g.element_of(Word(std::string(1, gs.letter(i))))}));
        j["generators"] = gens;
        break;
    }
    case Group::Kind::product:
        j["kind"] = "product";
        j["left"] = group_to_json(g.left());
        j["right"] = group_to_json(g.right());
        break;
    }
    return j;
}

Group group_from_json(const json& j) {
    if (!j.is_object())
        fail("group must be a JSON object");
    std::string kind = field(j, "kind").get<std::string>();
    if (kind == "free") {
        auto gens = string_list(field(j, "generators"));
        std::map<char, char> inverses;
        if (j.contains("inverses"))
            for (auto& [k, v] : j.at("inverses").items()) {
                if (k.size() != 1)
                    fail("inverse map keys must be single letters");
                inverses[k[0]] = one_letter(v, "inverse letter")[0];
            }
        std::vector<std::pair<char, char>> pairs;
        for (const std::string& s : gens) {
            if (s.size() != 1)
                fail("generators must be single letters");
            char c = s[0];
            auto it = inverses.find(c);
            if (it != inverses.end())
                pairs.emplace_back(c, it->second);
            else if (std::islower(static_cast<unsigned char>(c)))
                pairs.emplace_back(c, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
            else
                fail(std::string("generator '") + c + "' needs an explicit inverse letter");
        }
        return Group::free_group(pairs);
    }
    if (kind == "free_abelian")
        return Group::free_abelian(field(j, "rank").get<int>());
    if (kind == "finite") {
        auto elements = string_list(field(j, "elements"));
        std::vector<std::vector<int>> table;
        for (const auto& row : field(j, "table")) {
            std::vector<int> r;
            for (const auto& v : row)
                r.push_back(v.get<int>());
            table.push_back(std::move(r));
        }
        auto element_index = [&elements](const json& v) {
            if (v.is_number_integer())
                return v.get<int>();
            auto name = v.get<std::string>();
            auto it = std::find(elements.begin(), elements.end(), name);
            if (it == elements.end())
                fail("generator names unknown element '" + name + "'");
            return static_cast<int>(it - elements.begin());
        };
        std::vector<std::pair<char, int>> gens;
        if (j.contains("generators")) {
            const json& gj = j.at("generators");
            if (gj.is_array()) {
                for (const auto& e : gj)
                    gens.emplace_back(one_letter(e.at(0), "generator letter")[0],
                                      element_index(e.at(1)));
            } else {
                for (auto& [k, v] : gj.items()) {
                    if (k.size() != 1)
                        fail("generator letters must be single characters");
                    gens.emplace_back(k[0], element_index(v));
                }
            }
        }
        return Group::finite_group(std::move(elements), std::move(table), std::move(gens));
    }
    if (kind == "product")
        return Group::direct_product(group_from_json(field(j, "left")),
                                     group_from_json(field(j, "right")));
    fail("unknown group kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// subshifts

json pattern_to_json(const Pattern& p, const std::vector<std::string>& alphabet) {
    json j;
    json support = json::array();
    for (const Word& c : p.support())
        support.push_back(c.letters);
    j["support"] = support;
    if (p.is_exact()) {
        json symbols = json::array();
        for (const auto& set : p.cells())
            symbols.push_back(alphabet.at(static_cast<std::size_t>(set[0])));
        j["symbols"] = symbols;
    } else {
        json sets = json::array();
        for (const auto& set : p.cells()) {
            json names = json::array();
            for (Symbol s : set)
                names.push_back(alphabet.at(static_cast<std::size_t>(s)));
            sets.push_back(names);
        }
        j["symbol_sets"] = sets;
    }
    return j;
}

Pattern pattern_from_json(const json& j, const Group& g,
                          const std::vector<std::string>& alphabet) {
    auto symbol_index = [&alphabet](const std::string& name) {
        for (std::size_t i = 0; i < alphabet.size(); ++i)
            if (alphabet[i] == name)
                return static_cast<Symbol>(i);
        fail("unknown symbol '" + name + "'");
    };
    std::vector<Word> support = word_list(field(j, "support"));
    std::vector<std::vector<Symbol>> sets;
    if (j.contains("symbols")) {
        for (const auto& s : j.at("symbols"))
            sets.push_back({symbol_index(s.get<std::string>())});
    } else if (j.contains("symbol_sets")) {
        for (const auto& set : j.at("symbol_sets")) {
            std::vector<Symbol> out;
            for (const auto& s : set)
                out.push_back(symbol_index(s.get<std::string>()));
            sets.push_back(std::move(out));
        }
    } else {
        fail("pattern needs \"symbols\" or \"symbol_sets\"");
    }
    return Pattern(g, std::move(support), std::move(sets));
}

json sft_to_json(const Sft& x) {
    json j;
    j["spec"] = 1;
    j["group"] = group_to_json(x.group());
    j["alphabet"] = x.alphabet();
    json forbidden = json::array();
    for (const Pattern& p : x.forbidden())
        forbidden.push_back(pattern_to_json(p, x.alphabet()));
    j["forbidden"] = forbidden;
    return j;
}

Sft sft_from_json(const json& doc) {
    require_spec(doc);
    Group g = group_from_json(field(doc, "group"));
    std::vector<std::string> alphabet = string_list(field(doc, "alphabet"));
    std::vector<Pattern> forbidden;
    if (doc.contains("forbidden"))
        for (const auto& pj : doc.at("forbidden"))
            forbidden.push_back(pattern_from_json(pj, g, alphabet));
    return Sft(std::move(g), std::move(alphabet), std::move(forbidden));
}

// ---------------------------------------------------------------------------
// homomorphisms and friends

Homomorphism hom_from_json(const json& doc) {
    require_spec(doc);
    Group source = group_from_json(field(doc, "source"));
    Group target = group_from_json(field(doc, "target"));
    std::map<char, Word> images;
    for (auto& [k, v] : field(doc, "images").items()) {
        if (k.size() != 1)
            fail("image keys must be single letters");
        images[k[0]] = word_of(v);
    }
    return Homomorphism(std::move(source), std::move(target), images);
}

KernelData kernel_from_json(const json& doc) {
    Homomorphism hom = hom_from_json(doc);
    if (!doc.contains("kernel_generators"))
        fail("missing field \"kernel_generators\"");
    return KernelData(std::move(hom), word_list(doc.at("kernel_generators")));
}

SectionData sections_from_json(const json& doc) {
    Homomorphism hom = hom_from_json(doc);
    if (!doc.contains("sections"))
        fail("missing field \"sections\"");
    std::map<char, Word> sections;
    for (auto& [k, v] : doc.at("sections").items()) {
        if (k.size() != 1)
            fail("section keys must be single letters");
        sections[k[0]] = word_of(v);
    }
    return SectionData(std::move(hom), sections);
}

FiniteIndexData finite_index_from_json(const json& doc) {
    require_spec(doc);
    Group ambient = group_from_json(field(doc, "ambient"));
    Group subgroup = group_from_json(field(doc, "subgroup"));
    // embed images keyed by subgroup base letters; emit in letter order
    std::map<char, Word> by_letter;
    for (auto& [k, v] : field(doc, "embed").items()) {
        if (k.size() != 1)
            fail("embed keys must be single letters");
        by_letter[k[0]] = word_of(v);
    }
    std::vector<Word> images;
    const GeneratorSet& gs = subgroup.generators();
    for (int i = 0; i < gs.size(); ++i) {
        char c = gs.letter(i);
        if (gs.index_of(gs.inverse(c)) < i)
            continue;
        auto it = by_letter.find(c);
        if (it == by_letter.end())
            fail(std::string("missing embed image for subgroup generator '") + c + "'");
        images.push_back(it->second);
    }
    int radius = doc.contains("search_radius") ? doc.at("search_radius").get<int>() : 8;
    return FiniteIndexData(std::move(ambient), std::move(subgroup), std::move(images),
                           word_list(field(doc, "transversal")), radius);
}

// ---------------------------------------------------------------------------
// actions

DisplacementAlphabet ActionSpec::alphabet() const {
    return DisplacementAlphabet(acting, space, displacements);
}

RelatorSet ActionSpec::relator_set() const {
    if (relators.empty())
        return RelatorSet::canonical(acting);
    std::vector<Word> all = acting.relators();
    all.insert(all.end(), relators.begin(), relators.end());
    return RelatorSet(acting, all);
}

ActionSpec action_from_json(const json& doc) {
    require_spec(doc);
    Group acting = group_from_json(field(doc, "acting"));
    Group space = group_from_json(field(doc, "space"));
    std::vector<Word> displacements = word_list(field(doc, "displacements"));
    std::vector<Word> relators;
    if (doc.contains("relators"))
        relators = word_list(doc.at("relators"));
    if (doc.contains("builtin")) {
        auto act = builtin_action(doc.at("builtin").get<std::string>(), acting, space);
        return ActionSpec{std::move(acting), std::move(space), std::move(displacements),
                          std::move(act), std::move(relators)};
    }
    if (doc.contains("table") || doc.contains("defaults")) {
        std::map<std::pair<std::string, char>, Word> table;
        if (doc.contains("table"))
            for (const auto& e : doc.at("table"))
                table[{field(e, "cell").get<std::string>(),
                       one_letter(field(e, "letter"), "table letter")[0]}] =
                    word_of(field(e, "to"));
        std::map<char, Word> defaults;
        if (doc.contains("defaults"))
            for (auto& [k, v] : doc.at("defaults").items()) {
                if (k.size() != 1)
                    fail("default keys must be single letters");
                defaults[k[0]] = word_of(v);
            }
        auto act = table_action(acting, space, displacements, std::move(table),
                                std::move(defaults));
        return ActionSpec{std::move(acting), std::move(space), std::move(displacements),
                          std::move(act), std::move(relators)};
    }
    fail("action needs \"builtin\" or a displacement \"table\"/\"defaults\"");
}

// ---------------------------------------------------------------------------
// configurations

LazyConfiguration config_from_json(const json& doc) {
    require_spec(doc);
    Group g = group_from_json(field(doc, "group"));
    std::vector<std::string> alphabet = string_list(field(doc, "alphabet"));
    auto symbol_index = [&alphabet](const std::string& name) {
        for (std::size_t i = 0; i < alphabet.size(); ++i)
            if (alphabet[i] == name)
                return static_cast<Symbol>(i);
        fail("unknown symbol '" + name + "'");
    };
    std::string kind =
        doc.contains("config") && doc.at("config").is_string()
            ? doc.at("config").get<std::string>()
            : std::string();
    if (kind == "constant")
        return LazyConfiguration::constant(g, alphabet,
                                           symbol_index(field(doc, "symbol").get<std::string>()));
    if (kind == "parity")
        return LazyConfiguration::parity(g, alphabet);
    if (kind == "quotient") {
        QuotientWitness qw;
        qw.modulus = field(doc, "modulus").get<int>();
        for (const auto& s : field(doc, "symbols"))
            qw.symbols.push_back(symbol_index(s.get<std::string>()));
        return config_from_witness(g, alphabet, WitnessData{std::move(qw)});
    }
    if (kind == "tree_automaton") {
        TreeAutomatonWitness tw;
        tw.initial = field(doc, "initial").get<int>();
        for (const auto& s : field(doc, "state_symbols"))
            tw.state_symbol.push_back(symbol_index(s.get<std::string>()));
        for (const auto& row : field(doc, "transitions")) {
            std::vector<int> r;
            for (const auto& v : row)
                r.push_back(v.get<int>());
            tw.next.push_back(std::move(r));
        }
        return config_from_witness(g, alphabet, WitnessData{std::move(tw)});
    }
    if (kind == "finite_orbit") {
        json homdoc = field(doc, "hom");
        homdoc["spec"] = 1;
        Homomorphism phi = hom_from_json(homdoc);
        if (!(phi.source() == g))
            fail("finite-orbit homomorphism must start at the configuration group");
        std::vector<Symbol> y0;
        for (const auto& s : field(doc, "symbols"))
            y0.push_back(symbol_index(s.get<std::string>()));
        return finite_orbit_point(phi, std::move(y0), alphabet);
    }
    if (doc.contains("cells")) {
        auto table = std::make_shared<std::unordered_map<std::string, Symbol>>();
        for (const auto& e : doc.at("cells"))
            (*table)[g.normal_form(word_of(field(e, "cell"))).letters] =
                symbol_index(field(e, "symbol").get<std::string>());
        json fragment;
        fragment["config"] = "patch";
        fragment["cells"] = doc.at("cells");
        return LazyConfiguration(
            g, alphabet,
            [table](const Word& nf) {
                auto it = table->find(nf.letters);
                if (it == table->end())
                    throw input_error("cell '" + nf.letters + "' lies outside the patch");
                return it->second;
            },
            fragment.dump());
    }
    fail("unrecognized configuration kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// outputs

json certificate_to_json(const EmptinessCertificate& cert, const Sft& context) {
    json j;
    j["spec"] = 1;
    switch (cert.verdict) {
    case EmptinessCertificate::Verdict::empty:
        j["verdict"] = "empty";
        j["radius"] = cert.radius;
        break;
    case EmptinessCertificate::Verdict::unknown:
        j["verdict"] = "unknown";
        j["radius"] = cert.radius;
        break;
    case EmptinessCertificate::Verdict::nonempty_periodic: {
        j["verdict"] = "nonempty_periodic";
        LazyConfiguration cfg =
            config_from_witness(context.group(), context.alphabet(), *cert.witness);
        j["witness"] = json::parse(cfg.description());
        break;
    }
    }
    return j;
}

json patch_to_json(const LazyConfiguration& c, int radius, const Sft* x) {
    json j;
    j["spec"] = 1;
    j["group"] = group_to_json(c.group());
    j["alphabet"] = c.alphabet();
    j["config"] = json::parse(c.description());
    j["radius"] = radius;
    json cells = json::array();
    for (const Word& g : c.group().ball(radius)) {
        json e;
        e["cell"] = g.letters;
        e["symbol"] = c.symbol_name(c.value(g));
        cells.push_back(e);
    }
    j["cells"] = cells;
    if (x) {
        VerifyResult res = verify_configuration(*x, c, radius);
        json v;
        v["ok"] = res.ok;
        v["radius"] = radius;
        if (!res.ok) {
            v["violation_translate"] = res.translate.letters;
            v["violation_pattern"] = res.pattern_index;
        }
        j["verification"] = v;
    }
    return j;
}

} // namespace sft::io
