#include "sft/group.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

namespace sft {

// ---------------------------------------------------------------------------
// GeneratorSet

GeneratorSet GeneratorSet::from_base(const std::vector<std::pair<char, char>>& pairs) {
    GeneratorSet gs;
    for (auto [base, inv] : pairs) {
        if (gs.contains(base))
            throw input_error(std::string("duplicate generator letter '") + base + "'");
        gs.letters_.push_back(base);
        gs.inverses_.push_back(inv);
        gs.rebuild_index();
        if (inv != base) {
            if (gs.contains(inv))
                throw input_error(std::string("duplicate generator letter '") + inv + "'");
            gs.letters_.push_back(inv);
            gs.inverses_.push_back(base);
            gs.rebuild_index();
        }
    }
    return gs;
}

void GeneratorSet::rebuild_index() {
    index_.fill(-1);
    for (int i = 0; i < static_cast<int>(letters_.size()); ++i)
        index_[static_cast<unsigned char>(letters_[static_cast<std::size_t>(i)])] = i;
}

char GeneratorSet::inverse(char c) const {
    int i = index_of(c);
    if (i < 0)
        throw input_error(std::string("unknown generator letter '") + c + "'");
    return inverses_[static_cast<std::size_t>(i)];
}

Word GeneratorSet::invert(const Word& w) const {
    Word out;
    out.letters.reserve(w.size());
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
        out.letters.push_back(inverse(*it));
    return out;
}

bool word_less(const GeneratorSet& gs, const Word& a, const Word& b) {
    if (a.size() != b.size())
        return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        int ia = gs.index_of(a.letters[i]);
        int ib = gs.index_of(b.letters[i]);
        if (ia != ib)
            return ia < ib;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Group

struct Group::Data {
    Kind kind;
    GeneratorSet gens;
    int rank = 0;

    // per letter index: base-generator position and sign (free kinds)
    std::vector<int> letter_base;
    std::vector<int> letter_sign;

    // finite kind
    std::vector<std::string> elem_names;
    std::vector<std::vector<int>> table;
    int identity = 0;
    std::vector<int> letter_elem; // per letter index
    std::vector<Word> elem_word;  // canonical word per element

    // product kind
    std::optional<Group> left, right;

    std::string description;
    std::vector<Word> relators;
};

namespace {

void check_letter(const GeneratorSet& gs, char c) {
    if (!gs.contains(c))
        throw input_error(std::string("unknown generator letter '") + c + "'");
}

std::vector<std::pair<char, char>> default_pairs(const std::string& base) {
    std::vector<std::pair<char, char>> pairs;
    for (char c : base) {
        if (!std::islower(static_cast<unsigned char>(c)))
            throw input_error(std::string("generator '") + c +
                              "' needs an explicit inverse letter (only lowercase letters get the uppercase convention)");
        pairs.emplace_back(c, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return pairs;
}

} // namespace

static void fill_letter_base(Group::Data& d,
                             const std::vector<std::pair<char, char>>& pairs) {
    d.letter_base.assign(static_cast<std::size_t>(d.gens.size()), -1);
    d.letter_sign.assign(static_cast<std::size_t>(d.gens.size()), 0);
    for (int b = 0; b < static_cast<int>(pairs.size()); ++b) {
        d.letter_base[static_cast<std::size_t>(d.gens.index_of(pairs[static_cast<std::size_t>(b)].first))] = b;
        d.letter_sign[static_cast<std::size_t>(d.gens.index_of(pairs[static_cast<std::size_t>(b)].first))] = 1;
        d.letter_base[static_cast<std::size_t>(d.gens.index_of(pairs[static_cast<std::size_t>(b)].second))] = b;
        d.letter_sign[static_cast<std::size_t>(d.gens.index_of(pairs[static_cast<std::size_t>(b)].second))] = -1;
    }
}

Group Group::free_group(const std::string& base_letters) {
    return free_group(default_pairs(base_letters));
}

Group Group::free_group(const std::vector<std::pair<char, char>>& letter_pairs) {
    if (letter_pairs.empty())
        throw input_error("free group needs at least one generator");
    for (auto [b, i] : letter_pairs)
        if (b == i)
            throw input_error("free-group generators cannot be self-inverse");
    auto d = std::make_shared<Data>();
    d->kind = Kind::free;
    d->gens = GeneratorSet::from_base(letter_pairs);
    d->rank = static_cast<int>(letter_pairs.size());
    fill_letter_base(*d, letter_pairs);
    std::ostringstream desc;
    desc << "free[" << d->gens.letters() << "]";
    d->description = desc.str();
    return Group(std::move(d));
}

Group Group::free_abelian(int rank) {
    if (rank < 1 || rank > 26)
        throw input_error("free-abelian rank must be between 1 and 26");
    std::vector<std::pair<char, char>> pairs;
    for (int i = 0; i < rank; ++i)
        pairs.emplace_back(static_cast<char>('a' + i), static_cast<char>('A' + i));
    auto d = std::make_shared<Data>();
    d->kind = Kind::free_abelian;
    d->gens = GeneratorSet::from_base(pairs);
    d->rank = rank;
    fill_letter_base(*d, pairs);
    std::ostringstream desc;
    desc << "free_abelian[" << rank << "]";
    d->description = desc.str();
    // commutator relators over base generators
    for (int i = 0; i < rank; ++i)
        for (int j = i + 1; j < rank; ++j) {
            std::string r;
            r.push_back(pairs[static_cast<std::size_t>(i)].first);
            r.push_back(pairs[static_cast<std::size_t>(j)].first);
            r.push_back(pairs[static_cast<std::size_t>(i)].second);
            r.push_back(pairs[static_cast<std::size_t>(j)].second);
            d->relators.emplace_back(r);
        }
    return Group(std::move(d));
}

Group Group::finite_group(std::vector<std::string> elements,
                          std::vector<std::vector<int>> table,
                          std::map<char, int> generators) {
    std::vector<std::pair<char, int>> ordered(generators.begin(), generators.end());
    return finite_group(std::move(elements), std::move(table), std::move(ordered));
}

Group Group::finite_group(std::vector<std::string> elements,
                          std::vector<std::vector<int>> table,
                          std::vector<std::pair<char, int>> ordered_generators) {
    const int n = static_cast<int>(elements.size());
    if (n == 0)
        throw input_error("finite group needs at least one element");
    if (static_cast<int>(table.size()) != n)
        throw input_error("multiplication table must be square");
    for (const auto& row : table) {
        if (static_cast<int>(row.size()) != n)
            throw input_error("multiplication table must be square");
        for (int v : row)
            if (v < 0 || v >= n)
                throw input_error("multiplication table entry out of range");
    }
    // identity, associativity, inverses
    int identity = -1;
    for (int e = 0; e < n; ++e) {
        bool ok = true;
        for (int j = 0; j < n && ok; ++j)
            ok = table[static_cast<std::size_t>(e)][static_cast<std::size_t>(j)] == j &&
                 table[static_cast<std::size_t>(j)][static_cast<std::size_t>(e)] == j;
        if (ok) {
            identity = e;
            break;
        }
    }
    if (identity < 0)
        throw input_error("multiplication table has no identity element");
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (table[static_cast<std::size_t>(table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])][static_cast<std::size_t>(c)] !=
                    table[static_cast<std::size_t>(a)][static_cast<std::size_t>(table[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)])])
                    throw input_error("multiplication table is not associative");
    std::vector<int> inverse_of(static_cast<std::size_t>(n), -1);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b)
            if (table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] == identity) {
                inverse_of[static_cast<std::size_t>(a)] = b;
                break;
            }
        if (inverse_of[static_cast<std::size_t>(a)] < 0)
            throw input_error("multiplication table has an element without inverse");
    }

    if (ordered_generators.empty()) {
        char next = 'a';
        for (int e = 0; e < n; ++e) {
            if (e == identity)
                continue;
            if (next > 'z')
                throw input_error("too many finite-group elements for automatic generator letters");
            ordered_generators.emplace_back(next++, e);
        }
        if (ordered_generators.empty()) // trivial group: a letter for the identity element
            ordered_generators.emplace_back('a', identity);
    }

    // symmetric closure: make sure every generator's inverse element has a letter
    std::map<int, char> elem_letter;
    std::map<char, int> letter_to_elem;
    for (auto [c, e] : ordered_generators) {
        if (e < 0 || e >= n)
            throw input_error("generator letter names an element out of range");
        if (elem_letter.count(e))
            throw input_error("two generator letters name the same element");
        if (letter_to_elem.count(c))
            throw input_error(std::string("duplicate generator letter '") + c + "'");
        elem_letter[e] = c;
        letter_to_elem[c] = e;
    }
    // emit pairs in the given letter order, adding uppercase letters for
    // inverse elements that have none
    std::vector<std::pair<char, char>> pairs;
    std::unordered_set<char> consumed;
    for (auto [c, e] : ordered_generators) {
        if (consumed.count(c))
            continue;
        int inv = inverse_of[static_cast<std::size_t>(e)];
        if (inv == e) {
            pairs.emplace_back(c, c);
            consumed.insert(c);
        } else if (elem_letter.count(inv)) {
            char ci = elem_letter[inv];
            pairs.emplace_back(c, ci);
            consumed.insert(c);
            consumed.insert(ci);
        } else {
            char ci = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (ci == c || letter_to_elem.count(ci))
                throw input_error(std::string("cannot derive an inverse letter for generator '") + c + "'");
            elem_letter[inv] = ci;
            letter_to_elem[ci] = inv;
            pairs.emplace_back(c, ci);
            consumed.insert(c);
            consumed.insert(ci);
        }
    }

    auto d = std::make_shared<Data>();
    d->kind = Kind::finite;
    d->gens = GeneratorSet::from_base(pairs);
    d->elem_names = std::move(elements);
    d->table = std::move(table);
    d->identity = identity;
    d->letter_elem.assign(static_cast<std::size_t>(d->gens.size()), -1);
    for (auto [c, e] : letter_to_elem)
        d->letter_elem[static_cast<std::size_t>(d->gens.index_of(c))] = e;

    // canonical word per element: BFS from the identity, letters in order
    d->elem_word.assign(static_cast<std::size_t>(n), Word{});
    std::vector<bool> reached(static_cast<std::size_t>(n), false);
    reached[static_cast<std::size_t>(identity)] = true;
    std::vector<int> frontier{identity};
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int e : frontier)
            for (int li = 0; li < d->gens.size(); ++li) {
                int ge = d->letter_elem[static_cast<std::size_t>(li)];
                int to = d->table[static_cast<std::size_t>(e)][static_cast<std::size_t>(ge)];
                if (!reached[static_cast<std::size_t>(to)]) {
                    reached[static_cast<std::size_t>(to)] = true;
                    d->elem_word[static_cast<std::size_t>(to)] =
                        Word(d->elem_word[static_cast<std::size_t>(e)].letters + d->gens.letter(li));
                    next.push_back(to);
                }
            }
        frontier = std::move(next);
    }
    for (bool r : reached)
        if (!r)
            throw input_error("generator letters do not generate the finite group");

    std::ostringstream desc;
    desc << "finite[";
    for (int e = 0; e < n; ++e)
        desc << (e ? "," : "") << d->elem_names[static_cast<std::size_t>(e)];
    desc << ";";
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            desc << d->table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] << ((a == n - 1 && b == n - 1) ? "" : " ");
    desc << ";" << d->gens.letters() << "]";
    d->description = desc.str();

    // table-derived relators: w_a · w_b · (w_{ab})⁻¹ for every element pair
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            int ab = d->table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            Word r(d->elem_word[static_cast<std::size_t>(a)].letters +
                   d->elem_word[static_cast<std::size_t>(b)].letters +
                   d->gens.invert(d->elem_word[static_cast<std::size_t>(ab)]).letters);
            if (!r.empty())
                d->relators.push_back(std::move(r));
        }
    return Group(std::move(d));
}

Group Group::direct_product(const Group& left, const Group& right) {
    for (char c : right.generators().letters())
        if (left.generators().contains(c))
            throw input_error(std::string("product factors share the generator letter '") + c +
                              "'; rename one factor's generators");
    auto d = std::make_shared<Data>();
    d->kind = Kind::product;
    std::vector<std::pair<char, char>> pairs;
    auto collect = [&pairs](const GeneratorSet& gs) {
        std::unordered_set<char> done;
        for (int i = 0; i < gs.size(); ++i) {
            char c = gs.letter(i);
            if (done.count(c))
                continue;
            char ci = gs.inverse(c);
            pairs.emplace_back(c, ci);
            done.insert(c);
            done.insert(ci);
        }
    };
    collect(left.generators());
    collect(right.generators());
    d->gens = GeneratorSet::from_base(pairs);
    d->left = left;
    d->right = right;
    d->description = "product[" + left.description() + "," + right.description() + "]";
    // factor relators plus cross commutators over base letters
    for (const Word& r : left.relators())
        d->relators.push_back(r);
    for (const Word& r : right.relators())
        d->relators.push_back(r);
    std::unordered_set<char> lbase, rbase;
    for (int i = 0; i < left.generators().size(); ++i) {
        char c = left.generators().letter(i);
        if (!lbase.count(left.generators().inverse(c)))
            lbase.insert(c);
    }
    for (int i = 0; i < right.generators().size(); ++i) {
        char c = right.generators().letter(i);
        if (!rbase.count(right.generators().inverse(c)))
            rbase.insert(c);
    }
    for (int i = 0; i < left.generators().size(); ++i) {
        char s = left.generators().letter(i);
        if (!lbase.count(s))
            continue;
        for (int j = 0; j < right.generators().size(); ++j) {
            char t = right.generators().letter(j);
            if (!rbase.count(t))
                continue;
            std::string r;
            r.push_back(s);
            r.push_back(t);
            r.push_back(d->gens.inverse(s));
            r.push_back(d->gens.inverse(t));
            d->relators.emplace_back(r);
        }
    }
    return Group(std::move(d));
}

Group::Kind Group::kind() const { return data_->kind; }
const GeneratorSet& Group::generators() const { return data_->gens; }

int Group::rank() const {
    if (data_->kind != Kind::free && data_->kind != Kind::free_abelian)
        throw input_error("rank is defined for free and free-abelian groups only");
    return data_->rank;
}

const Group& Group::left() const {
    if (data_->kind != Kind::product)
        throw input_error("not a product group");
    return *data_->left;
}

const Group& Group::right() const {
    if (data_->kind != Kind::product)
        throw input_error("not a product group");
    return *data_->right;
}

int Group::element_count() const {
    if (data_->kind != Kind::finite)
        throw input_error("not a finite group");
    return static_cast<int>(data_->elem_names.size());
}

const std::vector<std::string>& Group::element_names() const {
    if (data_->kind != Kind::finite)
        throw input_error("not a finite group");
    return data_->elem_names;
}

int Group::element_of(const Word& w) const {
    if (data_->kind != Kind::finite)
        throw input_error("not a finite group");
    int e = data_->identity;
    for (char c : w.letters) {
        check_letter(data_->gens, c);
        int ge = data_->letter_elem[static_cast<std::size_t>(data_->gens.index_of(c))];
        e = data_->table[static_cast<std::size_t>(e)][static_cast<std::size_t>(ge)];
    }
    return e;
}

const Word& Group::element_word(int index) const {
    if (data_->kind != Kind::finite)
        throw input_error("not a finite group");
    return data_->elem_word.at(static_cast<std::size_t>(index));
}

Word Group::normal_form(const Word& w) const {
    const Data& d = *data_;
    switch (d.kind) {
    case Kind::free: {
        std::string st;
        for (char c : w.letters) {
            check_letter(d.gens, c);
            if (!st.empty() && st.back() == d.gens.inverse(c))
                st.pop_back();
            else
                st.push_back(c);
        }
        return Word(std::move(st));
    }
    case Kind::free_abelian: {
        std::vector<long long> e(static_cast<std::size_t>(d.rank), 0);
        for (char c : w.letters) {
            check_letter(d.gens, c);
            int li = d.gens.index_of(c);
            e[static_cast<std::size_t>(d.letter_base[static_cast<std::size_t>(li)])] +=
                d.letter_sign[static_cast<std::size_t>(li)];
        }
        std::string out;
        for (int b = 0; b < d.rank; ++b) {
            long long v = e[static_cast<std::size_t>(b)];
            char pos = static_cast<char>('a' + b), neg = static_cast<char>('A' + b);
            for (long long k = 0; k < (v > 0 ? v : -v); ++k)
                out.push_back(v > 0 ? pos : neg);
        }
        return Word(std::move(out));
    }
    case Kind::finite:
        return d.elem_word[static_cast<std::size_t>(element_of(w))];
    case Kind::product: {
        std::string lw, rw;
        for (char c : w.letters) {
            if (d.left->generators().contains(c))
                lw.push_back(c);
            else if (d.right->generators().contains(c))
                rw.push_back(c);
            else
                throw input_error(std::string("unknown generator letter '") + c + "'");
        }
        return Word(d.left->normal_form(Word(std::move(lw))).letters +
                    d.right->normal_form(Word(std::move(rw))).letters);
    }
    }
    throw input_error("corrupt group kind");
}

bool Group::is_identity(const Word& w) const { return normal_form(w).empty(); }

Word Group::multiply(const Word& a, const Word& b) const {
    return normal_form(Word(a.letters + b.letters));
}

Word Group::inverse_word(const Word& w) const {
    return normal_form(generators().invert(w));
}

std::vector<Word> Group::ball(int n) const {
    if (n < 0)
        throw input_error("ball radius must be >= 0");
    std::vector<Word> out{Word{}};
    std::unordered_set<std::string> seen{""};
    std::vector<Word> frontier{Word{}};
    for (int dist = 1; dist <= n && !frontier.empty(); ++dist) {
        std::vector<Word> next;
        for (const Word& w : frontier)
            for (int li = 0; li < generators().size(); ++li) {
                Word nf = normal_form(Word(w.letters + generators().letter(li)));
                if (seen.insert(nf.letters).second)
                    next.push_back(std::move(nf));
            }
        std::sort(next.begin(), next.end(), [this](const Word& a, const Word& b) {
            return word_less(generators(), a, b);
        });
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

std::vector<Word> Group::relators() const { return data_->relators; }

std::vector<long long> Group::abelianized_exponents(const Word& w) const {
    const Data& d = *data_;
    if (d.kind != Kind::free && d.kind != Kind::free_abelian)
        throw input_error("abelianized exponents are defined for free kinds only");
    std::vector<long long> e(static_cast<std::size_t>(d.rank), 0);
    for (char c : w.letters) {
        check_letter(d.gens, c);
        int li = d.gens.index_of(c);
        e[static_cast<std::size_t>(d.letter_base[static_cast<std::size_t>(li)])] +=
            d.letter_sign[static_cast<std::size_t>(li)];
    }
    return e;
}

const std::string& Group::description() const { return data_->description; }

// ---------------------------------------------------------------------------
// Homomorphism

Homomorphism::Homomorphism(Group source, Group target, const std::map<char, Word>& images)
    : source_(std::move(source)), target_(std::move(target)) {
    const GeneratorSet& gs = source_.generators();
    for (auto& [c, w] : images) {
        if (!gs.contains(c))
            throw input_error(std::string("image given for unknown source letter '") + c + "'");
        images_[c] = target_.normal_form(w); // also validates the letters
    }
    for (int i = 0; i < gs.size(); ++i) {
        char c = gs.letter(i);
        char ci = gs.inverse(c);
        auto have = images_.count(c), have_inv = images_.count(ci);
        if (!have && !have_inv)
            throw input_error(std::string("missing image for source generator '") + c + "'");
        if (have && have_inv) {
            if (c != ci && images_[ci] != target_.inverse_word(images_[c]))
                throw input_error(std::string("images of '") + c + "' and '" + ci +
                                  "' do not respect the involution");
        } else if (have && !have_inv) {
            images_[ci] = target_.inverse_word(images_[c]);
        } else {
            images_[c] = target_.inverse_word(images_[ci]);
        }
        if (c == ci && !target_.is_identity(Word(images_[c].letters + images_[c].letters)))
            throw input_error(std::string("image of involutive generator '") + c +
                              "' must have order dividing 2");
    }
    for (const Word& r : source_.relators())
        if (!target_.is_identity(apply(r)))
            throw input_error("relator '" + r.letters + "' does not map to the identity");
}

const Word& Homomorphism::image(char source_letter) const {
    auto it = images_.find(source_letter);
    if (it == images_.end())
        throw input_error(std::string("unknown source letter '") + source_letter + "'");
    return it->second;
}

Word Homomorphism::apply(const Word& w) const {
    std::string acc;
    for (char c : w.letters)
        acc += image(c).letters;
    return target_.normal_form(Word(std::move(acc)));
}

Homomorphism Homomorphism::identity(const Group& g) {
    std::map<char, Word> images;
    for (int i = 0; i < g.generators().size(); ++i) {
        char c = g.generators().letter(i);
        images[c] = Word(std::string(1, c));
    }
    return Homomorphism(g, g, images);
}

// ---------------------------------------------------------------------------
// FiniteIndexData

FiniteIndexData::FiniteIndexData(Group ambient, Group subgroup,
                                 std::vector<Word> embed_images,
                                 std::vector<Word> transversal, int search_radius)
    : ambient_(std::move(ambient)), subgroup_(std::move(subgroup)) {
    const GeneratorSet& sg = subgroup_.generators();
    // expand per-base-letter images to all letters
    int bases = 0;
    for (int i = 0; i < sg.size(); ++i)
        if (sg.index_of(sg.inverse(sg.letter(i))) >= i)
            ++bases;
    if (static_cast<int>(embed_images.size()) != bases)
        throw input_error("need exactly one embedding image per subgroup base generator");
    embed_images_.assign(static_cast<std::size_t>(sg.size()), Word{});
    int next = 0;
    for (int i = 0; i < sg.size(); ++i) {
        char c = sg.letter(i);
        if (sg.index_of(sg.inverse(c)) < i)
            continue;
        Word img = ambient_.normal_form(embed_images[static_cast<std::size_t>(next)]);
        ++next;
        embed_images_[static_cast<std::size_t>(i)] = img;
        embed_images_[static_cast<std::size_t>(sg.index_of(sg.inverse(c)))] =
            ambient_.inverse_word(img);
    }

    if (transversal.empty())
        throw input_error("transversal must contain the identity");
    transversal_.reserve(transversal.size());
    std::unordered_set<std::string> seen;
    for (const Word& t : transversal) {
        Word nf = ambient_.normal_form(t);
        if (!seen.insert(nf.letters).second)
            throw input_error("transversal entries must be distinct");
        transversal_.push_back(std::move(nf));
    }
    if (!transversal_[0].empty())
        throw input_error("first transversal entry must be the identity");

    // search (i, u) with t_i · embed(u) = target (prefix) or
    // embed(u) · t_i = target (suffix); shortest u, then lexicographic,
    // then smallest transversal index
    std::vector<Word> hball = subgroup_.ball(search_radius);
    auto find_entry = [&](const Word& target, bool prefix) -> std::pair<int, Word> {
        for (const Word& h : hball) {
            Word eh = embed_word(h);
            for (int i = 0; i < static_cast<int>(transversal_.size()); ++i) {
                Word cand = prefix
                                ? ambient_.multiply(transversal_[static_cast<std::size_t>(i)], eh)
                                : ambient_.multiply(eh, transversal_[static_cast<std::size_t>(i)]);
                if (cand == target)
                    return {i, h};
            }
        }
        throw input_error("finite-index rewriting table incomplete at search radius " +
                          std::to_string(search_radius) +
                          "; data inconsistent or radius too small");
    };

    transversal_in_subgroup_.assign(transversal_.size(), std::nullopt);
    for (std::size_t i = 0; i < transversal_.size(); ++i)
        for (const Word& h : hball)
            if (embed_word(h) == transversal_[i]) {
                transversal_in_subgroup_[i] = h;
                break;
            }

    const GeneratorSet& ag = ambient_.generators();
    prefix_.assign(static_cast<std::size_t>(ag.size()), {});
    suffix_.assign(static_cast<std::size_t>(ag.size()), {});
    for (int la = 0; la < ag.size(); ++la) {
        Word a(std::string(1, ag.letter(la)));
        auto& prow = prefix_[static_cast<std::size_t>(la)];
        auto& srow = suffix_[static_cast<std::size_t>(la)];
        prow.reserve(transversal_.size());
        srow.reserve(transversal_.size());
        for (std::size_t j = 0; j < transversal_.size(); ++j) {
            prow.push_back(find_entry(ambient_.multiply(a, transversal_[j]), true));
            srow.push_back(find_entry(ambient_.multiply(transversal_[j], a), false));
        }
    }
}

Word FiniteIndexData::embed_word(const Word& subgroup_word) const {
    const GeneratorSet& sg = subgroup_.generators();
    std::string acc;
    for (char c : subgroup_word.letters) {
        check_letter(sg, c);
        acc += embed_images_[static_cast<std::size_t>(sg.index_of(c))].letters;
    }
    return ambient_.normal_form(Word(std::move(acc)));
}

std::pair<Word, Word> FiniteIndexData::coset_rewrite(const Word& v) const {
    const GeneratorSet& ag = ambient_.generators();
    int state = 0;
    std::string u_acc;
    for (auto it = v.letters.rbegin(); it != v.letters.rend(); ++it) {
        check_letter(ag, *it);
        const auto& [i2, u] = prefix_[static_cast<std::size_t>(ag.index_of(*it))][static_cast<std::size_t>(state)];
        u_acc = u.letters + u_acc;
        state = i2;
    }
    return {transversal_[static_cast<std::size_t>(state)],
            subgroup_.normal_form(Word(std::move(u_acc)))};
}

std::pair<Word, Word> FiniteIndexData::coset_rewrite_suffix(const Word& v) const {
    auto [i, u] = coset_rewrite_suffix_index(v);
    return {transversal_[static_cast<std::size_t>(i)], std::move(u)};
}

const std::optional<Word>& FiniteIndexData::transversal_subgroup_word(int i) const {
    return transversal_in_subgroup_.at(static_cast<std::size_t>(i));
}

std::pair<int, Word> FiniteIndexData::coset_rewrite_suffix_index(const Word& v) const {
    const GeneratorSet& ag = ambient_.generators();
    int state = 0;
    std::string u_acc;
    for (char c : v.letters) {
        check_letter(ag, c);
        const auto& [i2, u] = suffix_[static_cast<std::size_t>(ag.index_of(c))][static_cast<std::size_t>(state)];
        u_acc += u.letters;
        state = i2;
    }
    return {state, subgroup_.normal_form(Word(std::move(u_acc)))};
}

} // namespace sft
