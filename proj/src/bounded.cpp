#include "sft/bounded.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

namespace sft {

// ---------------------------------------------------------------------------
// DisplacementAlphabet

DisplacementAlphabet::DisplacementAlphabet(Group acting, Group space,
                                           std::vector<Word> displacement_set)
    : acting_(std::move(acting)), space_(std::move(space)) {
    if (displacement_set.empty())
        throw input_error("displacement set must be nonempty");
    std::unordered_set<std::string> seen;
    for (const Word& w : displacement_set) {
        Word nf = space_.normal_form(w);
        if (seen.insert(nf.letters).second)
            disp_.push_back(std::move(nf));
    }
    for (const Word& w : disp_) {
        Word inv = space_.inverse_word(w);
        bool found = false;
        for (const Word& v : disp_)
            if (v == inv) {
                found = true;
                break;
            }
        if (!found)
            throw input_error("displacement set must contain the inverse of '" + w.letters + "'");
    }
    double count = 1;
    for (int i = 0; i < acting_.generators().size(); ++i)
        count *= static_cast<double>(disp_.size());
    if (count > 1'000'000)
        throw capacity_error("displacement alphabet is too large");
}

int DisplacementAlphabet::symbol_count() const {
    int count = 1;
    for (int i = 0; i < acting_.generators().size(); ++i)
        count *= static_cast<int>(disp_.size());
    return count;
}

std::vector<std::string> DisplacementAlphabet::symbol_names() const {
    std::vector<std::string> names;
    const int total = symbol_count();
    names.reserve(static_cast<std::size_t>(total));
    for (Symbol b = 0; b < total; ++b) {
        std::string s = "[";
        for (int li = 0; li < acting_.generators().size(); ++li) {
            const Word& d = displacement(b, acting_.generators().letter(li));
            s += (li ? "," : "");
            s += d.empty() ? "1" : d.letters;
        }
        s += "]";
        names.push_back(std::move(s));
    }
    return names;
}

int DisplacementAlphabet::component(Symbol b, char s) const {
    int li = acting_.generators().index_of(s);
    if (li < 0)
        throw input_error(std::string("unknown acting letter '") + s + "'");
    int idx = b;
    const int letters = acting_.generators().size();
    const int fsize = static_cast<int>(disp_.size());
    for (int skip = letters - 1 - li; skip > 0; --skip)
        idx /= fsize;
    return idx % fsize;
}

const Word& DisplacementAlphabet::displacement(Symbol b, char s) const {
    return disp_[static_cast<std::size_t>(component(b, s))];
}

Symbol DisplacementAlphabet::symbol_of_components(const std::vector<int>& f_index) const {
    if (static_cast<int>(f_index.size()) != acting_.generators().size())
        throw input_error("one displacement index per acting letter required");
    Symbol b = 0;
    for (int v : f_index) {
        if (v < 0 || v >= static_cast<int>(disp_.size()))
            throw input_error("displacement index out of range");
        b = b * static_cast<int>(disp_.size()) + v;
    }
    return b;
}

int DisplacementAlphabet::displacement_index(const Word& w) const {
    Word nf = space_.normal_form(w);
    for (int i = 0; i < static_cast<int>(disp_.size()); ++i)
        if (disp_[static_cast<std::size_t>(i)] == nf)
            return i;
    return -1;
}

// ---------------------------------------------------------------------------
// bundled actions

namespace {

char first_base_letter(const Group& g) {
    const GeneratorSet& gs = g.generators();
    return gs.letter(0);
}

} // namespace

TranslationLikeAction builtin_action(const std::string& name, Group acting, Group space) {
    TranslationLikeAction act{acting, space, {}, nullptr, nullptr};
    if (name == "shift_e1") {
        if (space.kind() != Group::Kind::free_abelian)
            throw input_error("shift_e1 requires a free-abelian space");
        if (acting.generators().size() != 2)
            throw input_error("shift_e1 requires a rank-1 acting group");
        char pos = first_base_letter(acting);
        char neg = acting.generators().inverse(pos);
        char sp = first_base_letter(space);
        char sn = space.generators().inverse(sp);
        Word fwd(std::string(1, sp)), bwd(std::string(1, sn));
        act.displacement_set = {fwd, bwd};
        Group sg = space;
        act.displacement = [pos, neg, fwd, bwd](const Word&, char s) {
            if (s == pos)
                return fwd;
            if (s == neg)
                return bwd;
            throw input_error(std::string("unknown acting letter '") + s + "'");
        };
        Group ag = acting;
        act.orbit_reps = [sg, ag, sp, sn, pos, neg](const Word& g) {
            auto e = sg.abelianized_exponents(g);
            long long first = e[0];
            std::string rep;
            for (std::size_t i = 1; i < e.size(); ++i) {
                char base = static_cast<char>('a' + static_cast<int>(i));
                char binv = sg.generators().inverse(base);
                for (long long k = 0; k < (e[i] > 0 ? e[i] : -e[i]); ++k)
                    rep.push_back(e[i] > 0 ? base : binv);
            }
            std::string wword(static_cast<std::size_t>(first > 0 ? first : -first),
                              first > 0 ? pos : neg);
            (void)sp;
            (void)sn;
            return std::make_pair(Word(std::move(rep)), Word(std::move(wword)));
        };
        return act;
    }
    if (name == "translation") {
        if (acting.kind() != Group::Kind::free_abelian ||
            space.kind() != Group::Kind::free_abelian || acting.rank() != space.rank())
            throw input_error("translation requires free-abelian groups of equal rank");
        Group ag = acting, sg = space;
        std::vector<Word> fs;
        for (int i = 0; i < sg.generators().size(); ++i)
            fs.emplace_back(std::string(1, sg.generators().letter(i)));
        act.displacement_set = fs;
        act.displacement = [ag, sg](const Word&, char s) {
            int li = ag.generators().index_of(s);
            if (li < 0)
                throw input_error(std::string("unknown acting letter '") + s + "'");
            return Word(std::string(1, sg.generators().letter(li)));
        };
        act.orbit_reps = [ag, sg](const Word& g) {
            auto e = sg.abelianized_exponents(g);
            std::string wword;
            for (std::size_t i = 0; i < e.size(); ++i) {
                char base = static_cast<char>('a' + static_cast<int>(i));
                char binv = ag.generators().inverse(base);
                for (long long k = 0; k < (e[i] > 0 ? e[i] : -e[i]); ++k)
                    wword.push_back(e[i] > 0 ? base : binv);
            }
            return std::make_pair(Word{}, Word(std::move(wword)));
        };
        return act;
    }
    if (name == "follow_first") {
        if (space.kind() != Group::Kind::free)
            throw input_error("follow_first requires a free space group");
        if (acting.generators().size() != 2)
            throw input_error("follow_first requires a rank-1 acting group");
        char pos = first_base_letter(acting);
        char neg = acting.generators().inverse(pos);
        char sp = first_base_letter(space);
        char sn = space.generators().inverse(sp);
        Word fwd(std::string(1, sp)), bwd(std::string(1, sn));
        act.displacement_set = {fwd, bwd};
        act.displacement = [pos, neg, fwd, bwd](const Word&, char s) {
            if (s == pos)
                return fwd;
            if (s == neg)
                return bwd;
            throw input_error(std::string("unknown acting letter '") + s + "'");
        };
        act.orbit_reps = [sp, sn, pos, neg](const Word& g) {
            // strip the trailing run of the followed generator
            long long n = 0;
            std::size_t end = g.letters.size();
            while (end > 0 && (g.letters[end - 1] == sp || g.letters[end - 1] == sn)) {
                n += (g.letters[end - 1] == sp) ? 1 : -1;
                --end;
            }
            std::string wword(static_cast<std::size_t>(n > 0 ? n : -n), n > 0 ? pos : neg);
            return std::make_pair(Word(g.letters.substr(0, end)), Word(std::move(wword)));
        };
        return act;
    }
    throw input_error("unknown builtin action '" + name + "'");
}

TranslationLikeAction table_action(Group acting, Group space, std::vector<Word> displacement_set,
                                   std::map<std::pair<std::string, char>, Word> table,
                                   std::map<char, Word> defaults) {
    TranslationLikeAction act{acting, space, std::move(displacement_set), nullptr, nullptr};
    Group sg = space;
    act.displacement = [sg, table = std::move(table),
                        defaults = std::move(defaults)](const Word& g, char s) {
        auto it = table.find({g.letters, s});
        if (it != table.end())
            return sg.normal_form(it->second);
        auto dit = defaults.find(s);
        if (dit != defaults.end())
            return sg.normal_form(dit->second);
        throw contract_error(std::string("no displacement for cell '") + g.letters +
                             "' and letter '" + s + "'");
    };
    return act;
}

// ---------------------------------------------------------------------------
// walks

Word walk_phi(const DisplacementAlphabet& alphabet, const Word& start,
              const LazyConfiguration& x, const Word& w) {
    const Group& space = alphabet.space();
    Word pos = space.normal_form(start);
    for (char s : w.letters) {
        Symbol b = x.value(pos);
        pos = space.multiply(pos, alphabet.displacement(b, s));
    }
    return pos;
}

// ---------------------------------------------------------------------------
// relators

RelatorSet::RelatorSet(const Group& acting, std::vector<Word> words) {
    std::unordered_set<std::string> seen;
    for (const Word& w : words) {
        if (!acting.is_identity(w))
            throw input_error("relator '" + w.letters + "' is not the identity");
        if (!w.empty() && seen.insert(w.letters).second)
            words_.push_back(w);
    }
    for (int li = 0; li < acting.generators().size(); ++li) {
        char c = acting.generators().letter(li);
        std::string pair{c, acting.generators().inverse(c)};
        if (seen.insert(pair).second)
            words_.emplace_back(pair);
    }
}

RelatorSet RelatorSet::canonical(const Group& acting) {
    return RelatorSet(acting, acting.relators());
}

// ---------------------------------------------------------------------------
// trace enumeration

namespace {

// One walk constraint in the making: which displacement component each
// visited cell uses, and (for overlays) which pattern cell each endpoint
// realizes.
struct TraceState {
    std::map<std::pair<std::string, char>, int> components; // (cell, letter) -> F index
    std::map<std::string, std::vector<std::size_t>> endpoints; // cell -> pattern cells
};

std::string box_key(const std::vector<Word>& support,
                    const std::vector<std::vector<Symbol>>& sets) {
    std::string key;
    for (std::size_t i = 0; i < support.size(); ++i) {
        key += support[i].letters;
        key += '|';
        for (Symbol s : sets[i])
            key += std::to_string(s) + ",";
        key += ';';
    }
    return key;
}

// symbols over the displacement alphabet matching the component constraints
std::vector<Symbol> component_filter(const DisplacementAlphabet& alphabet,
                                     const std::vector<std::pair<char, int>>& constraints) {
    std::vector<Symbol> ok;
    const int total = alphabet.symbol_count();
    for (Symbol b = 0; b < total; ++b) {
        bool match = true;
        for (auto [s, f] : constraints)
            if (alphabet.component(b, s) != f) {
                match = false;
                break;
            }
        if (match)
            ok.push_back(b);
    }
    return ok;
}

} // namespace

Sft build_T_sft(const Group& space, const DisplacementAlphabet& alphabet,
                const RelatorSet& relators, std::size_t trace_budget) {
    if (!(space == alphabet.space()))
        throw input_error("displacement alphabet lives on a different space group");
    const int fsize = static_cast<int>(alphabet.displacements().size());
    std::vector<Pattern> forbidden;
    std::set<std::string> seen;

    for (const Word& rel : relators.words()) {
        std::size_t leaves = 0;
        TraceState st;
        std::function<void(const Word&, std::size_t)> go = [&](const Word& pos, std::size_t step) {
            if (step == rel.letters.size()) {
                if (++leaves > trace_budget)
                    throw capacity_error("relator '" + rel.letters +
                                         "' exceeded the trace budget");
                if (pos.empty())
                    return; // walk closed
                // collect per-cell component constraints
                std::map<std::string, std::vector<std::pair<char, int>>> by_cell;
                for (const auto& [key, f] : st.components)
                    by_cell[key.first].emplace_back(key.second, f);
                std::vector<Word> support;
                std::vector<std::vector<Symbol>> sets;
                for (const auto& [cell, constraints] : by_cell) {
                    support.emplace_back(cell);
                    sets.push_back(component_filter(alphabet, constraints));
                    if (sets.back().empty())
                        return;
                }
                if (seen.insert(box_key(support, sets)).second)
                    forbidden.emplace_back(space, std::move(support), std::move(sets));
                return;
            }
            char s = rel.letters[step];
            auto key = std::make_pair(pos.letters, s);
            auto it = st.components.find(key);
            if (it != st.components.end()) {
                Word nxt = space.multiply(
                    pos, alphabet.displacements()[static_cast<std::size_t>(it->second)]);
                go(nxt, step + 1);
                return;
            }
            for (int f = 0; f < fsize; ++f) {
                st.components.emplace(key, f);
                Word nxt =
                    space.multiply(pos, alphabet.displacements()[static_cast<std::size_t>(f)]);
                go(nxt, step + 1);
                st.components.erase(key);
            }
        };
        go(Word{}, 0);
    }
    return Sft(space, alphabet.symbol_names(), std::move(forbidden));
}

Sft overlay_sft(const Sft& t_sft, const DisplacementAlphabet& alphabet, const Sft& x_on_acting,
                std::size_t trace_budget) {
    if (!(t_sft.group() == alphabet.space()))
        throw input_error("action layer lives on a different space group");
    if (!(x_on_acting.group() == alphabet.acting()))
        throw input_error("overlay subshift lives on a different acting group");
    if (t_sft.alphabet() != alphabet.symbol_names())
        throw input_error("action layer alphabet does not match the displacement alphabet");
    const Group& space = alphabet.space();
    const int bsize = static_cast<int>(t_sft.alphabet().size());
    const int asize = x_on_acting.alphabet_size();
    std::vector<std::string> combined = paired_alphabet(x_on_acting.alphabet(), t_sft.alphabet());

    std::vector<Pattern> forbidden;
    // action-layer constraints lifted to the product alphabet
    for (const Pattern& p : t_sft.forbidden()) {
        std::vector<std::vector<Symbol>> sets;
        for (const auto& set : p.cells()) {
            std::vector<Symbol> lifted;
            lifted.reserve(set.size() * static_cast<std::size_t>(asize));
            for (Symbol a = 0; a < asize; ++a)
                for (Symbol b : set)
                    lifted.push_back(a * bsize + b);
            sets.push_back(std::move(lifted));
        }
        forbidden.emplace_back(space, p.support(), std::move(sets));
    }

    // walk each forbidden pattern's support words along the displacement layer
    const int fsize = static_cast<int>(alphabet.displacements().size());
    std::set<std::string> seen;
    for (const Pattern& p : x_on_acting.forbidden()) {
        std::size_t leaves = 0;
        TraceState st;
        std::function<void(std::size_t, const Word&, std::size_t)> go =
            [&](std::size_t word_index, const Word& pos, std::size_t step) {
                if (word_index == p.support().size()) {
                    if (++leaves > trace_budget)
                        throw capacity_error("overlay pattern exceeded the trace budget");
                    // assemble the product-alphabet constraint
                    std::map<std::string, std::pair<std::vector<std::pair<char, int>>,
                                                    std::vector<std::size_t>>> cells;
                    for (const auto& [key, f] : st.components)
                        cells[key.first].first.emplace_back(key.second, f);
                    for (const auto& [cell, pcells] : st.endpoints)
                        for (std::size_t pc : pcells)
                            cells[cell].second.push_back(pc);
                    std::vector<Word> support;
                    std::vector<std::vector<Symbol>> sets;
                    for (const auto& [cell, cs] : cells) {
                        std::vector<Symbol> bset = component_filter(alphabet, cs.first);
                        // A-layer: intersect the pattern sets realized here
                        std::vector<char> a_ok(static_cast<std::size_t>(asize), 1);
                        for (std::size_t pc : cs.second)
                            for (Symbol a = 0; a < asize; ++a)
                                if (!p.admits(pc, a))
                                    a_ok[static_cast<std::size_t>(a)] = 0;
                        std::vector<Symbol> full;
                        for (Symbol a = 0; a < asize; ++a) {
                            if (!a_ok[static_cast<std::size_t>(a)])
                                continue;
                            for (Symbol b : bset)
                                full.push_back(a * bsize + b);
                        }
                        if (full.empty())
                            return; // this trace cannot realize the pattern
                        support.emplace_back(cell);
                        sets.push_back(std::move(full));
                    }
                    if (seen.insert(box_key(support, sets)).second)
                        forbidden.emplace_back(space, std::move(support), std::move(sets));
                    return;
                }
                const Word& hword = p.support()[word_index];
                if (step == hword.letters.size()) {
                    st.endpoints[pos.letters].push_back(word_index);
                    go(word_index + 1, Word{}, 0);
                    st.endpoints[pos.letters].pop_back();
                    if (st.endpoints[pos.letters].empty())
                        st.endpoints.erase(pos.letters);
                    return;
                }
                char s = hword.letters[step];
                auto key = std::make_pair(pos.letters, s);
                auto it = st.components.find(key);
                if (it != st.components.end()) {
                    Word nxt = space.multiply(
                        pos, alphabet.displacements()[static_cast<std::size_t>(it->second)]);
                    go(word_index, nxt, step + 1);
                    return;
                }
                for (int f = 0; f < fsize; ++f) {
                    st.components.emplace(key, f);
                    Word nxt = space.multiply(
                        pos, alphabet.displacements()[static_cast<std::size_t>(f)]);
                    go(word_index, nxt, step + 1);
                    st.components.erase(key);
                }
            };
        go(0, Word{}, 0);
    }
    return Sft(space, std::move(combined), std::move(forbidden));
}

// ---------------------------------------------------------------------------
// canonical point, decoding, encoding

LazyConfiguration canonical_point(const TranslationLikeAction& act,
                                  const DisplacementAlphabet& alphabet) {
    if (!(act.space == alphabet.space()) || !(act.acting == alphabet.acting()))
        throw input_error("action and displacement alphabet disagree on the groups");
    TranslationLikeAction a = act;
    DisplacementAlphabet alpha = alphabet;
    return LazyConfiguration(
        alphabet.space(), alphabet.symbol_names(),
        [a, alpha](const Word& nf) {
            std::vector<int> comps;
            for (int li = 0; li < alpha.acting().generators().size(); ++li) {
                char s = alpha.acting().generators().letter(li);
                Word d = a.displacement(nf, s);
                int f = alpha.displacement_index(d);
                if (f < 0)
                    throw contract_error("displacement '" + d.letters + "' at '" + nf.letters +
                                         "' lies outside the displacement set");
                comps.push_back(f);
            }
            return alpha.symbol_of_components(comps);
        },
        "{\"config\":\"canonical_action_point\"}");
}

LazyConfiguration overlay_b_layer(const LazyConfiguration& combined,
                                  const DisplacementAlphabet& alphabet) {
    const int bsize = alphabet.symbol_count();
    if (static_cast<int>(combined.alphabet().size()) % bsize != 0)
        throw input_error("combined alphabet is not a product with the displacement layer");
    LazyConfiguration inner = combined;
    std::string desc = "{\"config\":\"overlay_b_layer\",\"inner\":" + combined.description() + "}";
    return LazyConfiguration(
        combined.group(), alphabet.symbol_names(),
        [inner, bsize](const Word& nf) { return inner.value(nf) % bsize; }, std::move(desc));
}

LazyConfiguration decode_overlay(const LazyConfiguration& combined,
                                 const DisplacementAlphabet& alphabet,
                                 std::vector<std::string> a_alphabet) {
    const int bsize = alphabet.symbol_count();
    if (combined.alphabet().size() != a_alphabet.size() * static_cast<std::size_t>(bsize))
        throw input_error("combined alphabet does not factor as A x B");
    LazyConfiguration blayer = overlay_b_layer(combined, alphabet);
    LazyConfiguration inner = combined;
    DisplacementAlphabet alpha = alphabet;
    std::string desc = "{\"config\":\"overlay_decode\",\"inner\":" + combined.description() + "}";
    return LazyConfiguration(
        alphabet.acting(), std::move(a_alphabet),
        [inner, blayer, alpha, bsize](const Word& nf) {
            Word end = walk_phi(alpha, Word{}, blayer, nf);
            return inner.value(end) / bsize;
        },
        std::move(desc));
}

LazyConfiguration encode_overlay(const LazyConfiguration& z_on_acting,
                                 const TranslationLikeAction& act,
                                 const DisplacementAlphabet& alphabet) {
    if (!(z_on_acting.group() == act.acting))
        throw input_error("configuration lives on the wrong group for this encoding");
    if (!act.orbit_reps)
        throw input_error("encoding requires orbit representatives");
    LazyConfiguration base = canonical_point(act, alphabet);
    const int bsize = alphabet.symbol_count();
    LazyConfiguration z = z_on_acting;
    TranslationLikeAction a = act;
    Group space = alphabet.space();
    std::string desc =
        "{\"config\":\"overlay_encode\",\"inner\":" + z_on_acting.description() + "}";
    return LazyConfiguration(
        space, paired_alphabet(z_on_acting.alphabet(), alphabet.symbol_names()),
        [z, a, base, space, bsize](const Word& nf) {
            auto [rep, wword] = a.orbit_reps(nf);
            // the representative must walk back onto the cell
            Word pos = space.normal_form(rep);
            for (char s : wword.letters)
                pos = space.multiply(pos, a.displacement(pos, s));
            if (pos != nf)
                throw contract_error("orbit representative for '" + nf.letters +
                                     "' does not walk back onto it");
            Symbol avalue = z.value(wword);
            return avalue * bsize + base.value(nf);
        },
        std::move(desc));
}

} // namespace sft
