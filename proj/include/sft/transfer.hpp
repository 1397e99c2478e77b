#pragma once

#include <map>
#include <vector>

#include "sft/group.hpp"
#include "sft/subshift.hpp"

namespace sft {

// An epimorphism G -> H together with one source word per target generator
// mapping onto it. Construction validates each section and derives the
// inverse letters', which also witnesses surjectivity onto the generators.
class SectionData {
public:
    SectionData(Homomorphism hom, const std::map<char, Word>& sections);

    const Homomorphism& hom() const { return hom_; }
    const Word& section(char target_letter) const;

private:
    Homomorphism hom_;
    std::map<char, Word> sections_;
};

// An epimorphism G -> H with generators of its kernel. The generators are
// normal-formed and closed under inversion; generating the full kernel stays
// a caller contract.
class KernelData {
public:
    KernelData(Homomorphism hom, std::vector<Word> kernel_generators);

    const Homomorphism& hom() const { return hom_; }
    const std::vector<Word>& kernel_generators() const { return kernel_; }

private:
    Homomorphism hom_;
    std::vector<Word> kernel_;
};

// A block map given by an explicit table over its support. The table is
// indexed mixed-radix by the input symbols read along `support`, first cell
// most significant.
struct LocalRule {
    Group group;
    std::vector<Word> support; // order fixed by the table indexing
    std::vector<std::string> in_alphabet;
    std::vector<std::string> out_alphabet;
    std::vector<Symbol> table;

    LocalRule(Group g, std::vector<Word> support, std::vector<std::string> in_alphabet,
              std::vector<std::string> out_alphabet, std::vector<Symbol> table);

    static LocalRule identity_rule(const Group& g, std::vector<std::string> alphabet);
};

// Shortest-then-lexicographic preimages of the given target elements under
// rho, found by scanning source balls of growing radius. Capacity error when
// some target stays unreached.
std::vector<Word> lift_elements(const Homomorphism& rho, const std::vector<Word>& targets,
                                int max_radius = 10);

// g -> c(rho(g))
LazyConfiguration pullback_config(const Homomorphism& rho, const LazyConfiguration& c);

// u1...un -> c(w_{u1}...w_{un}); inverts pullback_config on pullbacks of X.
// When `provenance` is given, c is sanity-checked against it on a small ball.
LazyConfiguration section_config(const SectionData& sd, const LazyConfiguration& c,
                                 const Sft* provenance = nullptr);

// Pullback of an SFT along an epimorphism with finitely generated kernel:
// window E = lifts of the single-window support, plus the kernel generators
// and the identity; allowed patterns transport the window set and force
// kernel directions to repeat the centre.
Sft pullback_sft(const KernelData& kd, const Sft& x, int lift_radius = 10,
                 const EnumLimits& lim = {});

LocalRule lift_local_rule(const KernelData& kd, const LocalRule& rule, int lift_radius = 10);

LazyConfiguration apply_local_rule(const LocalRule& rule, const LazyConfiguration& c);

// Free extension along an embedding H -> G: same alphabet, supports
// re-expressed through the embedding.
Sft free_extension_sft(const Homomorphism& embed, const Sft& x);

// h -> c(embed(h))
LazyConfiguration restrict_config(const Homomorphism& embed, const LazyConfiguration& c);

// v -> c(u_v) where v = t_v · embed(u_v)
LazyConfiguration lift_config_finite_index(const FiniteIndexData& d, const LazyConfiguration& c);

// h -> (c(embed(h) · t))_{t in T}, over the tuple alphabet A^T
LazyConfiguration higher_block_encode(const FiniteIndexData& d, const LazyConfiguration& c);

// v -> e(u_v)(t_v) through the suffix decomposition v = embed(u_v) · t_v.
// Every transversal decomposition of v is cross-checked; a disagreement
// raises decode_error naming the cell.
LazyConfiguration higher_block_decode(const FiniteIndexData& d, const LazyConfiguration& e,
                                      std::vector<std::string> base_alphabet);

} // namespace sft
