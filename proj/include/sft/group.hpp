#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sft/errors.hpp"

namespace sft {

// A word over a generator set. Letters are single characters; the empty word
// is the group identity. Words compare structurally (for use as map keys);
// the semantic length-then-generator-order comparison lives in word_less.
struct Word {
    std::string letters;

    Word() = default;
    explicit Word(std::string s) : letters(std::move(s)) {}

    bool empty() const { return letters.empty(); }
    std::size_t size() const { return letters.size(); }

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;
};

// Finite symmetric generating set: an ordered list of letters together with
// a self-inverse pairing letter <-> inverse letter. The letter order is total
// and fixed; it drives every lexicographic tie-break downstream.
class GeneratorSet {
public:
    GeneratorSet() { index_.fill(-1); }

    // Letters and their inverses, interleaved base-then-inverse in the order
    // given: {'a','b'} yields the letter order a, A, b, B. A letter paired
    // with itself (an involution) is listed once.
    static GeneratorSet from_base(const std::vector<std::pair<char, char>>& pairs);

    int size() const { return static_cast<int>(letters_.size()); }
    char letter(int i) const { return letters_[static_cast<std::size_t>(i)]; }
    const std::string& letters() const { return letters_; }

    bool contains(char c) const { return index_of(c) >= 0; }
    int index_of(char c) const {
        return index_[static_cast<unsigned char>(c)];
    }
    char inverse(char c) const;

    // Reversed word with every letter inverted.
    Word invert(const Word& w) const;

    friend bool operator==(const GeneratorSet&, const GeneratorSet&) = default;

private:
    std::string letters_;
    std::string inverses_; // parallel to letters_
    std::array<int, 256> index_{};

    void rebuild_index();
};

// length-then-lexicographic order, lexicographic by generator position.
bool word_less(const GeneratorSet& gs, const Word& a, const Word& b);

// A finitely generated group with decidable word problem. Immutable; copies
// share the underlying data. Four kinds: free, free abelian, finite (given by
// a multiplication table), and direct products of the above.
class Group {
public:
    enum class Kind { free, free_abelian, finite, product };

    // Free group on the given base letters (inverses are the uppercase
    // letters by convention, or given explicitly).
    static Group free_group(const std::string& base_letters);
    static Group free_group(const std::vector<std::pair<char, char>>& letter_pairs);

    // Free abelian group of the given rank; generators a, b, c, ... with
    // uppercase inverses.
    static Group free_abelian(int rank);

    // Finite group from an element list and multiplication table
    // (table[i][j] = index of elements[i]*elements[j]). `generators` maps a
    // letter to the element index it names; when empty, every non-identity
    // element gets a letter a, b, c, ... in element order. Letters for
    // missing inverse elements are added automatically (uppercase). The
    // ordered overload fixes the letter order exactly as given.
    static Group finite_group(std::vector<std::string> elements,
                              std::vector<std::vector<int>> table,
                              std::map<char, int> generators = {});
    static Group finite_group(std::vector<std::string> elements,
                              std::vector<std::vector<int>> table,
                              std::vector<std::pair<char, int>> ordered_generators);

    // Direct product; the generator set is the disjoint union of the
    // factors' letters (a collision is an input error), the word metric is
    // the generator-union metric.
    static Group direct_product(const Group& left, const Group& right);

    Kind kind() const;
    const GeneratorSet& generators() const;
    // free / free_abelian only: number of base generators.
    int rank() const;
    const Group& left() const;  // product only
    const Group& right() const; // product only

    // finite only
    int element_count() const;
    const std::vector<std::string>& element_names() const;
    int element_of(const Word& w) const; // evaluate a word to an element index
    const Word& element_word(int index) const;

    // Canonical representative of the element w names. Idempotent; two words
    // get equal normal forms iff they are equal in the group. Unknown letters
    // are an input error.
    Word normal_form(const Word& w) const;
    bool is_identity(const Word& w) const;

    Word multiply(const Word& a, const Word& b) const; // normal_form(a·b)
    Word inverse_word(const Word& w) const;            // normal_form(w⁻¹)

    // All elements at word-metric distance <= n, as normal forms, sorted
    // length-then-lexicographic by the generator order.
    std::vector<Word> ball(int n) const;

    // Defining relators: none for free groups, generator commutators for
    // free abelian, the table-derived set for finite groups, factor relators
    // plus cross-commutators for products. Every relator is the identity.
    std::vector<Word> relators() const;

    // Net exponent of each base generator (free and free_abelian kinds).
    std::vector<long long> abelianized_exponents(const Word& w) const;

    // Structural description; equal strings iff structurally equal groups.
    const std::string& description() const;

    friend bool operator==(const Group& a, const Group& b) {
        return a.description() == b.description();
    }

    struct Data; // opaque shared state

private:
    std::shared_ptr<const Data> data_;
    explicit Group(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
};

// A homomorphism between two of our groups, given by one target word per
// source generator letter. Images of inverse letters are derived (and checked
// when supplied). Construction verifies every source relator maps to the
// identity.
class Homomorphism {
public:
    Homomorphism(Group source, Group target, const std::map<char, Word>& images);

    const Group& source() const { return source_; }
    const Group& target() const { return target_; }
    const Word& image(char source_letter) const;

    // Target normal form of the letter-by-letter image.
    Word apply(const Word& w) const;

    static Homomorphism identity(const Group& g);

private:
    Group source_;
    Group target_;
    std::map<char, Word> images_;
};

// Finite-index subgroup data: the ambient group, the subgroup as an abstract
// group whose base letters embed via `embed_images`, a left-coset transversal
// (first entry = identity), and the rewriting tables realizing
// v = t_v · embed(u_v) (prefix form) and v = embed(u_v) · t_v (suffix form).
// Tables are completed by a bounded shortest-then-lexicographic search
// through ambient normal forms; failure to complete is a construction error.
class FiniteIndexData {
public:
    FiniteIndexData(Group ambient, Group subgroup,
                    std::vector<Word> embed_images, // one per subgroup base letter
                    std::vector<Word> transversal,
                    int search_radius = 8);

    const Group& ambient() const { return ambient_; }
    const Group& subgroup() const { return subgroup_; }
    const std::vector<Word>& transversal() const { return transversal_; }

    // Subgroup word -> ambient normal form through the embedding.
    Word embed_word(const Word& subgroup_word) const;

    // v = transversal · embed(u); deterministic. Returns (t, u).
    std::pair<Word, Word> coset_rewrite(const Word& v) const;

    // v = embed(u) · transversal; deterministic. Returns (t, u).
    std::pair<Word, Word> coset_rewrite_suffix(const Word& v) const;

    // Index of the transversal entry returned by the suffix rewrite.
    std::pair<int, Word> coset_rewrite_suffix_index(const Word& v) const;

    // Subgroup word equal to the transversal entry, when the construction
    // search found one. Only redundant transversals have entries beyond the
    // identity.
    const std::optional<Word>& transversal_subgroup_word(int i) const;

private:
    Group ambient_;
    Group subgroup_;
    std::vector<Word> embed_images_; // per subgroup letter (all letters)
    std::vector<Word> transversal_;
    std::vector<std::optional<Word>> transversal_in_subgroup_;

    // prefix_[letter_index][j] = (i, u) with  letter · t_j = t_i · embed(u)
    // suffix_[letter_index][j] = (i, u) with  t_j · letter = embed(u) · t_i
    std::vector<std::vector<std::pair<int, Word>>> prefix_;
    std::vector<std::vector<std::pair<int, Word>>> suffix_;
};

} // namespace sft
