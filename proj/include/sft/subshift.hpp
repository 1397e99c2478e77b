#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "sft/group.hpp"

namespace sft {

using Symbol = int;

// A forbidden local constraint. Every support cell carries the sorted set of
// symbols it admits; the constraint matches a configuration when each cell's
// symbol lies in its set. Exact patterns (the common case, and the JSON
// default) have singleton sets everywhere. Supports are canonicalized on
// construction: normal forms, sorted length-then-lexicographic, distinct.
class Pattern {
public:
    Pattern(const Group& g, std::vector<Word> support,
            std::vector<std::vector<Symbol>> cell_sets);

    static Pattern exact(const Group& g, std::vector<Word> support,
                         std::vector<Symbol> symbols);

    const std::vector<Word>& support() const { return support_; }
    const std::vector<std::vector<Symbol>>& cells() const { return cells_; }
    bool is_exact() const;
    // word-metric radius of the farthest support cell
    int radius() const { return radius_; }

    bool admits(std::size_t cell, Symbol s) const;

    friend bool operator==(const Pattern&, const Pattern&) = default;

private:
    std::vector<Word> support_;
    std::vector<std::vector<Symbol>> cells_;
    int radius_ = 0;
};

// Subshift of finite type: a group, an ordered alphabet, and a finite list of
// forbidden patterns. Immutable.
class Sft {
public:
    Sft(Group group, std::vector<std::string> alphabet, std::vector<Pattern> forbidden);

    const Group& group() const { return group_; }
    const std::vector<std::string>& alphabet() const { return alphabet_; }
    int alphabet_size() const { return static_cast<int>(alphabet_.size()); }
    const std::vector<Pattern>& forbidden() const { return forbidden_; }
    int window_radius() const { return window_radius_; }

    Symbol symbol_index(const std::string& name) const; // input error if unknown

private:
    Group group_;
    std::vector<std::string> alphabet_;
    std::vector<Pattern> forbidden_;
    int window_radius_ = 0;
};

// Ball of a group with a fast normal-form -> index lookup.
struct BallContext {
    int radius = 0;
    std::vector<Word> cells;
    std::unordered_map<std::string, int> index;

    static BallContext make(const Group& g, int radius);
    int find(const Word& normal_form) const; // -1 when outside
};

struct EnumLimits {
    std::size_t max_results = 4'000'000;
    std::size_t max_nodes = 200'000'000;
};

// A total configuration queried by words; values are looked up through the
// normal form, so words naming the same element always agree. Memoized and
// safe for concurrent queries. `description` is a deterministic JSON snippet
// used by the CLI to exchange configuration descriptions.
class LazyConfiguration {
public:
    LazyConfiguration(Group group, std::vector<std::string> alphabet,
                      std::function<Symbol(const Word&)> fn, std::string description);

    const Group& group() const { return group_; }
    const std::vector<std::string>& alphabet() const { return alphabet_; }
    const std::string& description() const { return description_; }

    Symbol value(const Word& w) const;
    const std::string& symbol_name(Symbol s) const;

    static LazyConfiguration constant(const Group& g, std::vector<std::string> alphabet,
                                      Symbol s);
    // symbol = word length parity (alternating on Z)
    static LazyConfiguration parity(const Group& g, std::vector<std::string> alphabet);

private:
    Group group_;
    std::vector<std::string> alphabet_;
    std::function<Symbol(const Word&)> fn_;
    std::string description_;
    struct Memo;
    std::shared_ptr<Memo> memo_;
};

// --- emptiness certificates ------------------------------------------------

// A configuration factoring through a finite quotient: every free(-abelian)
// coordinate reduced mod `modulus`, finite factors kept whole. `symbols` is
// indexed row-major over the quotient enumeration.
struct QuotientWitness {
    int modulus = 1;
    std::vector<Symbol> symbols;
};

// A deterministic successor table over finitely many states, walked from the
// root along normal forms; the free-group analogue of a periodic description.
struct TreeAutomatonWitness {
    int initial = 0;
    std::vector<Symbol> state_symbol;
    std::vector<std::vector<int>> next; // [state][letter index]
};

using WitnessData = std::variant<QuotientWitness, TreeAutomatonWitness>;

struct EmptinessCertificate {
    enum class Verdict { empty, nonempty_periodic, unknown };
    Verdict verdict;
    int radius = 0; // exhausted radius (empty) / searched budget (unknown)
    std::optional<WitnessData> witness;
};

// Number of elements of the mod-`modulus` quotient, and the index of the
// element a word maps to (row-major; products splice factor indexes).
long long quotient_size(const Group& g, int modulus);
long long quotient_index(const Group& g, int modulus, const Word& w);

LazyConfiguration config_from_witness(const Group& g, std::vector<std::string> alphabet,
                                      const WitnessData& witness);

// --- operations --------------------------------------------------------------

// True iff no translate of a forbidden pattern lies fully inside ball(n) and
// matches the patch. `patch` is indexed by the ball's canonical order;
// n must be at least the window radius.
bool check_patch(const Sft& x, int n, std::span<const Symbol> patch);
bool check_patch(const Sft& x, const Pattern& patch); // support must equal ball(n)

// All admissible patterns on ball(n), in lexicographic order by symbol
// sequence over the sorted ball. Deterministic backtracking enumeration.
std::vector<Pattern> admissible_patches(const Sft& x, int n, const EnumLimits& = {});
// Same enumeration, returning raw symbol rows (cheaper for bulk work).
std::vector<std::vector<Symbol>> admissible_patch_rows(const Sft& x, int n,
                                                       const EnumLimits& = {});
bool has_admissible_patch(const Sft& x, int n, const EnumLimits& = {});
std::size_t admissible_patch_count(const Sft& x, int n, const EnumLimits& = {});

struct VerifyResult {
    bool ok = true;
    Word translate;        // offending translate (when !ok)
    int pattern_index = -1;
};

// Checks c against x on ball(n): scans every translate of a forbidden
// pattern whose support lies inside the ball. Reports the first violation in
// deterministic order.
VerifyResult verify_configuration(const Sft& x, const LazyConfiguration& c, int n);

// Exact for free and rank-1 free-abelian groups (and finite groups); for
// free-abelian rank >= 2 and products, a semi-oracle searching torus quotients
// (nonempty) and growing exhaustion radii (empty) up to `budget`, else Unknown.
EmptinessCertificate emptiness(const Sft& x, int budget = 8);

// Finite-quotient periodic point search; kinds free, free_abelian, finite.
std::optional<LazyConfiguration> periodic_point_search(const Sft& x, int max_quotient);

Sft product_sft(const Sft& x, const Sft& y);
Sft disjoint_union_sft(const Sft& x, const Sft& y);
Sft intersect_sft(const Sft& x, const Sft& y);

// SFT of configurations with x(g) = x(g·w⁻¹) for all g: all two-cell patterns
// on {identity, w⁻¹} with differing symbols are forbidden. Trivial w is an
// input error.
Sft stabilizer_sft(const Group& g, std::vector<std::string> alphabet, const Word& w);

// Alphabet helpers. Pair names are "(x,y)" with the left symbol major;
// tagged names are "l:x" / "r:y".
std::vector<std::string> paired_alphabet(const std::vector<std::string>& a,
                                         const std::vector<std::string>& b);
std::vector<std::string> tagged_union_alphabet(const std::vector<std::string>& a,
                                               const std::vector<std::string>& b);
// Tuple alphabet A^t with names "(x,...,z)", first position most significant.
std::vector<std::string> tuple_alphabet(const std::vector<std::string>& a, int t);

// JSON string fragment helpers shared by configuration descriptions.
std::string json_escape(const std::string& s);

// Directional overlap structure for window patterns on a free group:
// consistent(P, Q, letter) means P placed at g and Q placed at g·letter agree
// on every shared ball cell. On trees, edge-wise consistency of ball patterns
// is globally sufficient, which makes the survivor fixed point an exact
// emptiness oracle.
class TreeOverlap {
public:
    TreeOverlap(const Group& free_group, int radius);

    bool consistent(std::span<const Symbol> p, std::span<const Symbol> q, int letter) const;
    // greatest fixed point: indexes of window patterns with a consistent
    // neighbour in every letter direction
    std::vector<int> survivors(const std::vector<std::vector<Symbol>>& window_set) const;
    // first surviving pattern consistent with p across the letter, -1 if none
    int min_successor(const std::vector<std::vector<Symbol>>& window_set,
                      const std::vector<int>& alive, int p, int letter) const;
    const BallContext& ball() const;

private:
    Group g_;
    BallContext ball_;
    std::vector<std::vector<std::pair<int, int>>> shared_;
};

// Exact emptiness of { x : every ball(n) view of x lies in window_set } for
// free groups and rank-1 free-abelian groups. Throws oracle_error elsewhere.
bool window_set_nonempty(const Group& g, int alphabet_size, int n,
                         const std::vector<std::vector<Symbol>>& window_set);

// --- one-dimensional helpers -------------------------------------------------

// Z-specific machinery (free or free-abelian of rank 1). Forbidden patterns
// become integer-offset constraints; words are runs of consecutive cells.
namespace z1d {

struct LinearConstraint {
    std::vector<std::pair<int, const std::vector<Symbol>*>> cells; // offset (>=0), set
    int span = 0; // max offset + 1
};

bool is_line_group(const Group& g);
std::vector<LinearConstraint> linear_constraints(const Sft& x);

// Admissible words of the given length, lexicographically ordered.
std::vector<std::vector<Symbol>> admissible_words(const Sft& x, int length,
                                                  const EnumLimits& = {});

} // namespace z1d

} // namespace sft
