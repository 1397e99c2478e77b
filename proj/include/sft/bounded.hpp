#pragma once

#include <functional>
#include <map>
#include <vector>

#include "sft/group.hpp"
#include "sft/subshift.hpp"

namespace sft {

// Symbols are maps from the acting group's generators to a finite set F of
// displacement words in the space group. Symbol index is mixed-radix over the
// acting letters in order, F index per letter, first letter most significant.
class DisplacementAlphabet {
public:
    DisplacementAlphabet(Group acting, Group space, std::vector<Word> displacement_set);

    const Group& acting() const { return acting_; }
    const Group& space() const { return space_; }
    const std::vector<Word>& displacements() const { return disp_; }

    int symbol_count() const;
    std::vector<std::string> symbol_names() const;

    // F index read by symbol b for the acting letter s
    int component(Symbol b, char s) const;
    const Word& displacement(Symbol b, char s) const;
    Symbol symbol_of_components(const std::vector<int>& f_index_per_letter) const;
    int displacement_index(const Word& w) const; // -1 when outside F

private:
    Group acting_;
    Group space_;
    std::vector<Word> disp_;
};

// A bounded free right action of `acting` on `space`, given by procedures.
// `displacement(g, s)` returns the word g^{-1}(g*s), always inside the
// displacement set; boundedness and freeness are spot-checked, not proven.
// `orbit_reps`, when present, returns (representative word, acting word w)
// with representative * w = g.
struct TranslationLikeAction {
    Group acting;
    Group space;
    std::vector<Word> displacement_set;
    std::function<Word(const Word&, char)> displacement;
    std::function<std::pair<Word, Word>(const Word&)> orbit_reps; // may be null
};

// Bundled actions: "shift_e1" (rank-1 acting group shifting the first
// coordinate of a free-abelian space), "translation" (free-abelian group
// translating itself), "follow_first" (rank-1 acting group following the
// first generator of a free group).
TranslationLikeAction builtin_action(const std::string& name, Group acting, Group space);

// Custom action from a finite displacement table plus per-letter defaults.
TranslationLikeAction table_action(Group acting, Group space, std::vector<Word> displacement_set,
                                   std::map<std::pair<std::string, char>, Word> table,
                                   std::map<char, Word> defaults);

// Endpoint of following the displacement arrows from `start` along the
// acting word w; the empty word returns the start.
Word walk_phi(const DisplacementAlphabet& alphabet, const Word& start,
              const LazyConfiguration& x, const Word& w);

// Finite relator list for the acting group; identity words only, with every
// s·s⁻¹ pair appended.
class RelatorSet {
public:
    RelatorSet(const Group& acting, std::vector<Word> words);
    static RelatorSet canonical(const Group& acting);

    const std::vector<Word>& words() const { return words_; }

private:
    std::vector<Word> words_;
};

// SFT over the displacement alphabet whose configurations close every
// relator walk. Forbidden constraints are the non-returning walk traces per
// relator, each constraining only the displacement components it read.
Sft build_T_sft(const Group& space, const DisplacementAlphabet& alphabet,
                const RelatorSet& relators, std::size_t trace_budget = 1 << 20);

// Overlay of an acting-group SFT on top of the bounded-action layer: product
// alphabet A x B, the action-layer constraints plus one constraint per
// forbidden pattern walk realizing it along the displacement arrows.
Sft overlay_sft(const Sft& t_sft, const DisplacementAlphabet& alphabet, const Sft& x_on_acting,
                std::size_t trace_budget = 1 << 20);

// The configuration recording the action's own displacements.
LazyConfiguration canonical_point(const TranslationLikeAction& act,
                                  const DisplacementAlphabet& alphabet);

// Projection of a product-alphabet configuration to the displacement layer.
LazyConfiguration overlay_b_layer(const LazyConfiguration& combined,
                                  const DisplacementAlphabet& alphabet);

// u -> A-layer value at the walk endpoint from the identity along u.
LazyConfiguration decode_overlay(const LazyConfiguration& combined,
                                 const DisplacementAlphabet& alphabet,
                                 std::vector<std::string> a_alphabet);

// A-layer carries z along every orbit (via orbit representatives), B-layer is
// the canonical point. Round-trip failures of orbit_reps raise contract_error.
LazyConfiguration encode_overlay(const LazyConfiguration& z_on_acting,
                                 const TranslationLikeAction& act,
                                 const DisplacementAlphabet& alphabet);

} // namespace sft
