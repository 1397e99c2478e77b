#include "sft/transfer.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace sft {

// ---------------------------------------------------------------------------
// SectionData / KernelData / LocalRule

SectionData::SectionData(Homomorphism hom, const std::map<char, Word>& sections)
    : hom_(std::move(hom)) {
    const Group& h = hom_.target();
    const Group& g = hom_.source();
    for (auto& [u, wu] : sections) {
        if (!h.generators().contains(u))
            throw input_error(std::string("section given for unknown target letter '") + u + "'");
        sections_[u] = g.normal_form(wu);
    }
    for (int i = 0; i < h.generators().size(); ++i) {
        char u = h.generators().letter(i);
        char ui = h.generators().inverse(u);
        bool have = sections_.count(u), have_inv = sections_.count(ui);
        if (!have && !have_inv)
            throw input_error(std::string("missing section for target generator '") + u + "'");
        if (!have)
            sections_[u] = g.inverse_word(sections_[ui]);
        if (!sections_.count(ui))
            sections_[ui] = g.inverse_word(sections_[u]);
        if (hom_.apply(sections_[u]) != h.normal_form(Word(std::string(1, u))))
            throw input_error(std::string("section for '") + u +
                              "' does not map onto the generator");
    }
}

const Word& SectionData::section(char target_letter) const {
    auto it = sections_.find(target_letter);
    if (it == sections_.end())
        throw input_error(std::string("unknown target letter '") + target_letter + "'");
    return it->second;
}

KernelData::KernelData(Homomorphism hom, std::vector<Word> kernel_generators)
    : hom_(std::move(hom)) {
    std::unordered_set<std::string> seen;
    auto add = [&](Word nf) {
        if (nf.empty())
            return;
        if (seen.insert(nf.letters).second)
            kernel_.push_back(std::move(nf));
    };
    for (const Word& k : kernel_generators) {
        Word nf = hom_.source().normal_form(k);
        if (!hom_.target().is_identity(hom_.apply(nf)))
            throw input_error("kernel generator '" + k.letters + "' does not map to the identity");
        Word inv = hom_.source().inverse_word(nf);
        add(std::move(nf));
        add(std::move(inv));
    }
}

LocalRule::LocalRule(Group g, std::vector<Word> support_in, std::vector<std::string> in_a,
                     std::vector<std::string> out_a, std::vector<Symbol> table_in)
    : group(std::move(g)), support(std::move(support_in)), in_alphabet(std::move(in_a)),
      out_alphabet(std::move(out_a)), table(std::move(table_in)) {
    if (support.empty())
        throw input_error("local rule needs a nonempty support");
    std::unordered_set<std::string> seen;
    for (Word& cell : support) {
        cell = group.normal_form(cell);
        if (!seen.insert(cell.letters).second)
            throw input_error("local rule support cells must be distinct");
    }
    std::size_t expect = 1;
    for (std::size_t i = 0; i < support.size(); ++i)
        expect *= in_alphabet.size();
    if (table.size() != expect)
        throw input_error("local rule table size does not match |A|^{support}");
    for (Symbol s : table)
        if (s < 0 || s >= static_cast<Symbol>(out_alphabet.size()))
            throw input_error("local rule table entry outside the output alphabet");
}

LocalRule LocalRule::identity_rule(const Group& g, std::vector<std::string> alphabet) {
    std::vector<Symbol> table;
    for (Symbol s = 0; s < static_cast<Symbol>(alphabet.size()); ++s)
        table.push_back(s);
    return LocalRule(g, {Word{}}, alphabet, alphabet, table);
}

// ---------------------------------------------------------------------------
// lifting through a homomorphism

std::vector<Word> lift_elements(const Homomorphism& rho, const std::vector<Word>& targets,
                                int max_radius) {
    const Group& g = rho.source();
    const Group& h = rho.target();
    std::vector<Word> lifts(targets.size());
    std::vector<char> found(targets.size(), 0);
    std::vector<Word> goals;
    goals.reserve(targets.size());
    for (const Word& t : targets)
        goals.push_back(h.normal_form(t));
    std::size_t remaining = targets.size();
    std::size_t scanned = 0;
    for (int r = 0; r <= max_radius && remaining > 0; ++r) {
        std::vector<Word> ball = g.ball(r);
        for (std::size_t i = scanned; i < ball.size(); ++i) {
            Word image = rho.apply(ball[i]);
            for (std::size_t t = 0; t < goals.size(); ++t)
                if (!found[t] && image == goals[t]) {
                    found[t] = 1;
                    lifts[t] = ball[i];
                    --remaining;
                }
            if (remaining == 0)
                break;
        }
        scanned = ball.size();
    }
    if (remaining > 0) {
        for (std::size_t t = 0; t < goals.size(); ++t)
            if (!found[t])
                throw capacity_error("no preimage of '" + goals[t].letters +
                                     "' within the lift radius");
    }
    return lifts;
}

// ---------------------------------------------------------------------------
// configuration maps

LazyConfiguration pullback_config(const Homomorphism& rho, const LazyConfiguration& c) {
    if (!(rho.target() == c.group()))
        throw input_error("configuration lives on the wrong group for this pullback");
    Homomorphism r = rho;
    LazyConfiguration inner = c;
    std::string desc = "{\"config\":\"pullback\",\"inner\":" + c.description() + "}";
    return LazyConfiguration(
        rho.source(), c.alphabet(),
        [r, inner](const Word& nf) { return inner.value(r.apply(nf)); }, std::move(desc));
}

LazyConfiguration section_config(const SectionData& sd, const LazyConfiguration& c,
                                 const Sft* provenance) {
    if (!(sd.hom().source() == c.group()))
        throw input_error("configuration lives on the wrong group for this section");
    if (provenance) {
        auto res = verify_configuration(*provenance, c, provenance->window_radius());
        if (!res.ok)
            throw contract_error("configuration violates the declared pullback near '" +
                                 res.translate.letters + "'");
    }
    SectionData s = sd;
    LazyConfiguration inner = c;
    std::string desc = "{\"config\":\"section\",\"inner\":" + c.description() + "}";
    return LazyConfiguration(
        sd.hom().target(), c.alphabet(),
        [s, inner](const Word& nf) {
            std::string acc;
            for (char u : nf.letters)
                acc += s.section(u).letters;
            return inner.value(Word(std::move(acc)));
        },
        std::move(desc));
}

// ---------------------------------------------------------------------------
// SFT transport

Sft pullback_sft(const KernelData& kd, const Sft& x, int lift_radius, const EnumLimits& lim) {
    if (!(kd.hom().target() == x.group()))
        throw input_error("subshift lives on the wrong group for this pullback");
    const Group& g = kd.hom().source();
    const Group& h = x.group();
    const int wr = x.window_radius();

    // single-window form of x
    std::vector<Word> window = h.ball(wr);
    std::vector<std::vector<Symbol>> allowed = admissible_patch_rows(x, wr, lim);

    std::vector<Word> lifts = lift_elements(kd.hom(), window, lift_radius);

    // window E: lifts, kernel generators, identity
    std::vector<Word> cells = lifts;
    cells.push_back(Word{});
    for (const Word& k : kd.kernel_generators())
        cells.push_back(k);
    std::sort(cells.begin(), cells.end(), [&g](const Word& a, const Word& b) {
        return word_less(g.generators(), a, b);
    });
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

    std::unordered_map<std::string, int> cell_index;
    for (int i = 0; i < static_cast<int>(cells.size()); ++i)
        cell_index.emplace(cells[static_cast<std::size_t>(i)].letters, i);

    const int asize = x.alphabet_size();
    double full = 1;
    for (std::size_t i = 0; i < cells.size(); ++i)
        full *= asize;
    if (full > static_cast<double>(lim.max_results))
        throw capacity_error("pullback window is too large to enumerate its complement");

    // allowed assignments on E: window values through the lifts, everything
    // else (kernel directions) tied to the centre
    int identity_cell = cell_index.at("");
    std::unordered_set<std::string> allowed_keys;
    for (const auto& row : allowed) {
        std::vector<Symbol> assign(cells.size(), -1);
        for (std::size_t f = 0; f < window.size(); ++f)
            assign[static_cast<std::size_t>(cell_index.at(lifts[f].letters))] = row[f];
        Symbol centre = assign[static_cast<std::size_t>(identity_cell)];
        for (auto& v : assign)
            if (v < 0)
                v = centre;
        std::string key;
        key.reserve(assign.size());
        for (Symbol v : assign)
            key.push_back(static_cast<char>('#' + v));
        allowed_keys.insert(std::move(key));
    }

    // forbidden = complement on E
    std::vector<Pattern> forbidden;
    std::vector<Symbol> assign(cells.size(), 0);
    while (true) {
        std::string key;
        key.reserve(assign.size());
        for (Symbol v : assign)
            key.push_back(static_cast<char>('#' + v));
        if (!allowed_keys.count(key))
            forbidden.push_back(Pattern::exact(g, cells, assign));
        int i = static_cast<int>(assign.size()) - 1;
        while (i >= 0 && assign[static_cast<std::size_t>(i)] == asize - 1)
            assign[static_cast<std::size_t>(i--)] = 0;
        if (i < 0)
            break;
        ++assign[static_cast<std::size_t>(i)];
    }
    return Sft(g, x.alphabet(), std::move(forbidden));
}

LocalRule lift_local_rule(const KernelData& kd, const LocalRule& rule, int lift_radius) {
    if (!(kd.hom().target() == rule.group))
        throw input_error("local rule lives on the wrong group for this lift");
    std::vector<Word> lifts = lift_elements(kd.hom(), rule.support, lift_radius);
    return LocalRule(kd.hom().source(), std::move(lifts), rule.in_alphabet, rule.out_alphabet,
                     rule.table);
}

LazyConfiguration apply_local_rule(const LocalRule& rule, const LazyConfiguration& c) {
    if (!(rule.group == c.group()))
        throw input_error("configuration lives on the wrong group for this rule");
    if (rule.in_alphabet != c.alphabet())
        throw input_error("configuration alphabet does not match the rule input");
    LocalRule r = rule;
    LazyConfiguration inner = c;
    std::string desc = "{\"config\":\"local_rule_image\",\"inner\":" + c.description() + "}";
    return LazyConfiguration(
        rule.group, rule.out_alphabet,
        [r, inner](const Word& nf) {
            std::size_t idx = 0;
            for (const Word& cell : r.support)
                idx = idx * r.in_alphabet.size() +
                      static_cast<std::size_t>(inner.value(r.group.multiply(nf, cell)));
            return r.table[idx];
        },
        std::move(desc));
}

Sft free_extension_sft(const Homomorphism& embed, const Sft& x) {
    if (!(embed.source() == x.group()))
        throw input_error("subshift lives on the wrong group for this extension");
    std::vector<Pattern> forbidden;
    for (const Pattern& p : x.forbidden()) {
        std::vector<Word> support;
        support.reserve(p.support().size());
        for (const Word& f : p.support())
            support.push_back(embed.apply(f));
        forbidden.emplace_back(embed.target(), std::move(support), p.cells());
    }
    return Sft(embed.target(), x.alphabet(), std::move(forbidden));
}

LazyConfiguration restrict_config(const Homomorphism& embed, const LazyConfiguration& c) {
    if (!(embed.target() == c.group()))
        throw input_error("configuration lives on the wrong group for this restriction");
    Homomorphism e = embed;
    LazyConfiguration inner = c;
    std::string desc = "{\"config\":\"restrict\",\"inner\":" + c.description() + "}";
    return LazyConfiguration(
        embed.source(), c.alphabet(),
        [e, inner](const Word& nf) { return inner.value(e.apply(nf)); }, std::move(desc));
}

LazyConfiguration lift_config_finite_index(const FiniteIndexData& d, const LazyConfiguration& c) {
    if (!(d.subgroup() == c.group()))
        throw input_error("configuration lives on the wrong group for this lift");
    FiniteIndexData fid = d;
    LazyConfiguration inner = c;
    std::string desc = "{\"config\":\"finite_index_lift\",\"inner\":" + c.description() + "}";
    return LazyConfiguration(
        d.ambient(), c.alphabet(),
        [fid, inner](const Word& nf) { return inner.value(fid.coset_rewrite(nf).second); },
        std::move(desc));
}

LazyConfiguration higher_block_encode(const FiniteIndexData& d, const LazyConfiguration& c) {
    if (!(d.ambient() == c.group()))
        throw input_error("configuration lives on the wrong group for this encoding");
    const int t = static_cast<int>(d.transversal().size());
    std::vector<std::string> tuples = tuple_alphabet(c.alphabet(), t);
    FiniteIndexData fid = d;
    LazyConfiguration inner = c;
    const std::size_t asize = c.alphabet().size();
    std::string desc = "{\"config\":\"higher_block_encode\",\"inner\":" + c.description() + "}";
    return LazyConfiguration(
        d.subgroup(), std::move(tuples),
        [fid, inner, asize](const Word& nf) {
            Word base = fid.embed_word(nf);
            std::size_t idx = 0;
            for (const Word& tcell : fid.transversal())
                idx = idx * asize +
                      static_cast<std::size_t>(inner.value(fid.ambient().multiply(base, tcell)));
            return static_cast<Symbol>(idx);
        },
        std::move(desc));
}

LazyConfiguration higher_block_decode(const FiniteIndexData& d, const LazyConfiguration& e,
                                      std::vector<std::string> base_alphabet) {
    if (!(d.subgroup() == e.group()))
        throw input_error("encoded configuration lives on the wrong group for this decoding");
    const int t = static_cast<int>(d.transversal().size());
    std::size_t expect = 1;
    for (int i = 0; i < t; ++i)
        expect *= base_alphabet.size();
    if (e.alphabet().size() != expect)
        throw input_error("encoded alphabet is not a |A|^T tuple alphabet");

    FiniteIndexData fid = d;
    LazyConfiguration inner = e;
    const std::size_t asize = base_alphabet.size();
    auto digit_at = [asize, t](Symbol tuple, int j) {
        std::size_t v = static_cast<std::size_t>(tuple);
        for (int skip = t - 1 - j; skip > 0; --skip)
            v /= asize;
        return static_cast<Symbol>(v % asize);
    };
    std::string desc = "{\"config\":\"higher_block_decode\",\"inner\":" + e.description() + "}";
    return LazyConfiguration(
        d.ambient(), std::move(base_alphabet),
        [fid, inner, digit_at](const Word& nf) {
            auto [i, u] = fid.coset_rewrite_suffix_index(nf);
            Symbol value = digit_at(inner.value(u), i);
            // cross-check every transversal decomposition of this cell; a
            // remainder is a subgroup element exactly when its rewrite lands
            // on a transversal entry that is itself in the subgroup
            const auto& ts = fid.transversal();
            for (int j = 0; j < static_cast<int>(ts.size()); ++j) {
                Word wj = fid.ambient().multiply(
                    nf, fid.ambient().inverse_word(ts[static_cast<std::size_t>(j)]));
                auto [i2, u2] = fid.coset_rewrite_suffix_index(wj);
                const auto& tail = fid.transversal_subgroup_word(i2);
                if (!tail)
                    continue;
                Word uj = fid.subgroup().multiply(u2, *tail);
                if (digit_at(inner.value(uj), j) != value)
                    throw decode_error("overlap inconsistency while decoding cell '" +
                                       nf.letters + "'");
            }
            return value;
        },
        std::move(desc));
}

} // namespace sft
