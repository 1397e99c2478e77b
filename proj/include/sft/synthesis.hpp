#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "sft/group.hpp"
#include "sft/subshift.hpp"

namespace sft {

// Nearest-neighbour SFT on a free group: one allowed relation on A x A per
// generator letter, with the relation for s⁻¹ kept as the transpose of the
// relation for s.
class NearestNeighborTreeSft {
public:
    // forbidden pairs (letter, centre symbol, neighbour symbol); the
    // transposed pair is forbidden across the inverse letter automatically
    NearestNeighborTreeSft(Group free_group, std::vector<std::string> alphabet,
                           const std::vector<std::tuple<char, Symbol, Symbol>>& forbidden_pairs);

    // allowed[letter][a][b]; symmetrized with the inverse letter's transpose
    static NearestNeighborTreeSft from_allowed(Group free_group,
                                               std::vector<std::string> alphabet,
                                               std::vector<std::vector<std::vector<char>>> allowed);

    // recognizes SFTs whose forbidden patterns sit on supports {1} or {1, s}
    static std::optional<NearestNeighborTreeSft> from_sft(const Sft& x);

    const Group& group() const { return group_; }
    const std::vector<std::string>& alphabet() const { return alphabet_; }
    int alphabet_size() const { return static_cast<int>(alphabet_.size()); }
    bool allowed(int letter_index, Symbol a, Symbol b) const;

    // equivalent Sft (two-cell forbidden patterns), e.g. for verification
    Sft to_sft() const;

private:
    Group group_;
    std::vector<std::string> alphabet_;
    std::vector<std::vector<std::vector<char>>> allowed_;
};

// Greatest fixed point of discarding symbols missing a compatible neighbour
// in some direction; the SFT is nonempty iff the result is nonempty.
std::vector<Symbol> prune_alive(const NearestNeighborTreeSft& x);

// The computable point built along the tree: the identity gets the minimal
// surviving symbol, every fresh cell the minimal compatible survivor.
// emptiness_error when nothing survives pruning.
LazyConfiguration greedy_tree_point(const NearestNeighborTreeSft& x);

// Conjugacy onto nearest-neighbour form: symbols are the admissible ball
// patterns, adjacency is overlap consistency, decoding reads the centre.
struct NnRecode {
    NearestNeighborTreeSft recoded;
    std::vector<std::vector<Symbol>> state_rows; // ball pattern per recode symbol
    int radius;
};

NnRecode nn_recode(const Sft& x, int radius, const EnumLimits& lim = {});

// Greedy point of the recoded system, read back through the centre cells.
LazyConfiguration decoded_greedy_point(const NnRecode& rc, std::vector<std::string> base_alphabet);

using WindowPattern = std::vector<Symbol>;
using WindowOracle = std::function<bool(const std::vector<WindowPattern>&)>;

// Inclusion-minimal subset of D with Y(L) nonempty. Entries are attempted
// for removal in ascending order of the given rows (callers pass D sorted);
// a removal is kept exactly when the oracle still reports nonempty.
// emptiness_error when Y(D) is already empty.
std::vector<WindowPattern> minimal_allowed_set(std::vector<WindowPattern> D,
                                               const WindowOracle& nonempty);

// Convenience overload: rows over ball(n) in ball order with the exact
// window oracle for the group.
std::vector<WindowPattern> minimal_allowed_set(const Group& g, int alphabet_size, int n,
                                               std::vector<WindowPattern> D);

// The window chain of a domino-guided extraction. Levels L_n are inclusion
// minimal window sets, patches p_n the lexicographically minimal members
// extending the previous patch. On rank-1 groups cells are ordered linearly
// (leftmost first); on free groups by the ball order. Growth happens on
// demand and is serialized internally.
class DominoChain {
public:
    DominoChain(Sft x, std::size_t level_capacity);

    const Sft& sft() const { return x_; }
    int base_radius() const { return n0_; }
    int depth() const; // largest materialized level radius
    void grow_to(int n);

    // level rows in the chain's cell order (linear on rank-1 groups)
    std::vector<WindowPattern> level(int n);
    WindowPattern patch(int n);

    Symbol value(const Word& normal_form);

private:
    struct State;
    Sft x_;
    int n0_;
    std::size_t level_capacity_;
    std::shared_ptr<State> state_;

    void grow_locked(int n);
    Symbol tree_extension_value(const Word& nf);
};

struct DominoPoint {
    std::shared_ptr<DominoChain> chain;
    LazyConfiguration config;
};

// Extraction guided by the exact emptiness oracle; supported on rank-1 and
// free groups (oracle_error elsewhere), emptiness_error on empty input.
DominoPoint domino_guided_point(const Sft& x, std::size_t level_capacity = 50'000);

// g -> y0[phi(g)] for a homomorphism onto a finite group; a configuration
// with finite orbit.
LazyConfiguration finite_orbit_point(const Homomorphism& phi, std::vector<Symbol> y0,
                                     std::vector<std::string> alphabet);

} // namespace sft
