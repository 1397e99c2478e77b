// Test-side oracles: brute-force enumeration and search routines kept
// independent of the library's own logic. These re-derive everything from
// forbidden words / explicit grids.
#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sft/group.hpp"
#include "sft/subshift.hpp"

namespace oracle {

// Forbidden word over symbol indexes, read on consecutive cells.
using Row = std::vector<sft::Symbol>;

inline bool contains_subword(const Row& word, const Row& sub) {
    if (sub.size() > word.size())
        return false;
    for (std::size_t s = 0; s + sub.size() <= word.size(); ++s) {
        bool m = true;
        for (std::size_t i = 0; i < sub.size() && m; ++i)
            m = word[s + i] == sub[i];
        if (m)
            return true;
    }
    return false;
}

inline bool word_admissible(const Row& word, const std::vector<Row>& forbidden) {
    for (const Row& f : forbidden)
        if (contains_subword(word, f))
            return false;
    return true;
}

// Count admissible length-n words by full enumeration.
inline long long count_words(int asize, int n, const std::vector<Row>& forbidden) {
    long long count = 0;
    Row w(static_cast<std::size_t>(n), 0);
    while (true) {
        if (word_admissible(w, forbidden))
            ++count;
        int i = n - 1;
        while (i >= 0 && w[static_cast<std::size_t>(i)] == asize - 1)
            w[static_cast<std::size_t>(i--)] = 0;
        if (i < 0)
            break;
        ++w[static_cast<std::size_t>(i)];
    }
    return count;
}

// Is there a cyclic word of period <= max_period whose infinite repetition
// avoids every forbidden word? Backtracking with early linear checks; the
// wrap-around placements are checked once the word is complete.
inline bool has_periodic_point(int asize, int max_period, const std::vector<Row>& forbidden) {
    std::size_t maxf = 1;
    for (const Row& f : forbidden)
        maxf = std::max(maxf, f.size());
    for (int k = 1; k <= max_period; ++k) {
        Row w;
        std::function<bool()> go = [&]() -> bool {
            if (static_cast<int>(w.size()) == k) {
                Row unrolled;
                int copies = static_cast<int>((maxf + static_cast<std::size_t>(k) - 1) /
                                              static_cast<std::size_t>(k)) + 1;
                for (int c = 0; c < copies; ++c)
                    unrolled.insert(unrolled.end(), w.begin(), w.end());
                return word_admissible(unrolled, forbidden);
            }
            for (sft::Symbol s = 0; s < asize; ++s) {
                w.push_back(s);
                bool fail = false;
                for (const Row& f : forbidden) {
                    if (f.size() <= w.size()) {
                        bool m = true;
                        for (std::size_t i = 0; i < f.size() && m; ++i)
                            m = w[w.size() - f.size() + i] == f[i];
                        if (m) {
                            fail = true;
                            break;
                        }
                    }
                }
                if (!fail && go())
                    return true;
                w.pop_back();
            }
            return false;
        };
        if (go())
            return true;
    }
    return false;
}

// Backtracking existence of an admissible length-n word.
inline bool exists_word(int asize, int n, const std::vector<Row>& forbidden) {
    Row w;
    std::function<bool()> go = [&]() -> bool {
        if (static_cast<int>(w.size()) == n)
            return true;
        for (sft::Symbol s = 0; s < asize; ++s) {
            w.push_back(s);
            bool fail = false;
            for (const Row& f : forbidden) {
                if (f.size() <= w.size()) {
                    bool m = true;
                    for (std::size_t i = 0; i < f.size() && m; ++i)
                        m = w[w.size() - f.size() + i] == f[i];
                    if (m) {
                        fail = true;
                        break;
                    }
                }
            }
            if (!fail && go())
                return true;
            w.pop_back();
        }
        return false;
    };
    return go();
}

// Exhaustive one-dimensional emptiness verdict: nonempty iff a periodic
// point of period <= max_period exists; empty iff no admissible word of
// length `length` exists. The two agree for window sizes <= max_period.
inline bool brute_nonempty_z(int asize, const std::vector<Row>& forbidden, int max_period = 12,
                             int length = 25) {
    if (has_periodic_point(asize, max_period, forbidden))
        return true;
    return exists_word(asize, length, forbidden);
}

// --- random instances ---------------------------------------------------

inline int rnd(std::mt19937& rng, int n) {
    return static_cast<int>(rng() % static_cast<unsigned>(n));
}

struct RandomZSft {
    int asize;
    std::vector<Row> forbidden_words;
    sft::Sft sft;
};

// Random Z-SFT over {0..asize-1} with forbidden words of length <= maxlen.
inline RandomZSft random_z_sft(std::mt19937& rng, const sft::Group& z, int max_asize = 3,
                               int max_words = 3, int maxlen = 3) {
    char base = z.generators().letter(0);
    int asize = 2 + rnd(rng, max_asize - 1);
    int nwords = 1 + rnd(rng, max_words);
    std::vector<Row> words;
    for (int i = 0; i < nwords; ++i) {
        int len = 1 + rnd(rng, maxlen);
        Row wrow;
        for (int j = 0; j < len; ++j)
            wrow.push_back(rnd(rng, asize));
        words.push_back(std::move(wrow));
    }
    std::vector<std::string> alphabet;
    for (int i = 0; i < asize; ++i)
        alphabet.push_back(std::to_string(i));
    std::vector<sft::Pattern> forbidden;
    for (const Row& wrow : words) {
        std::vector<sft::Word> support;
        for (std::size_t j = 0; j < wrow.size(); ++j)
            support.emplace_back(std::string(j, base));
        forbidden.push_back(sft::Pattern::exact(z, support, wrow));
    }
    return {asize, std::move(words), sft::Sft(z, std::move(alphabet), std::move(forbidden))};
}

// Linear rendering helpers for rank-1 groups: position -n..n -> ball index.
inline std::vector<int> line_positions(const sft::Group& z, int n) {
    auto ball = z.ball(n);
    std::vector<int> ball_index_of_position(static_cast<std::size_t>(2 * n + 1), -1);
    for (int i = 0; i < static_cast<int>(ball.size()); ++i) {
        int off = static_cast<int>(z.abelianized_exponents(ball[static_cast<std::size_t>(i)])[0]);
        ball_index_of_position[static_cast<std::size_t>(off + n)] = i;
    }
    return ball_index_of_position;
}

inline std::vector<sft::Symbol> linear_to_ball(const sft::Group& z, int n,
                                               const Row& linear) {
    auto pos = line_positions(z, n);
    std::vector<sft::Symbol> row(linear.size(), 0);
    for (std::size_t p = 0; p < linear.size(); ++p)
        row[static_cast<std::size_t>(pos[p])] = linear[p];
    return row;
}

// --- two-dimensional grid oracle ------------------------------------------
// Counts assignments on an explicit cell set of Z^2 avoiding every forbidden
// translate that fits fully inside; rederives pattern placement itself.

using Cell2 = std::pair<int, int>;

inline std::vector<Cell2> diamond(int n) {
    std::vector<Cell2> cells;
    for (int x = -n; x <= n; ++x)
        for (int y = -n; y <= n; ++y)
            if (std::abs(x) + std::abs(y) <= n)
                cells.emplace_back(x, y);
    return cells;
}

inline std::vector<Cell2> square(int half) {
    std::vector<Cell2> cells;
    for (int x = -half; x <= half; ++x)
        for (int y = -half; y <= half; ++y)
            cells.emplace_back(x, y);
    return cells;
}

inline long long grid_count(const sft::Sft& x_on_z2, const std::vector<Cell2>& cells) {
    struct Placement {
        int last = 0;
        std::vector<std::pair<int, const std::vector<sft::Symbol>*>> at;
    };
    std::map<Cell2, int> index;
    for (int i = 0; i < static_cast<int>(cells.size()); ++i)
        index.emplace(cells[static_cast<std::size_t>(i)], i);

    const sft::Group& g = x_on_z2.group();
    std::vector<Placement> placements;
    for (const sft::Pattern& p : x_on_z2.forbidden()) {
        std::vector<Cell2> offsets;
        for (const sft::Word& f : p.support()) {
            auto e = g.abelianized_exponents(f);
            offsets.emplace_back(static_cast<int>(e[0]), static_cast<int>(e[1]));
        }
        std::set<Cell2> bases;
        for (const Cell2& c : cells)
            for (const Cell2& f : offsets)
                bases.emplace(c.first - f.first, c.second - f.second);
        for (const Cell2& base : bases) {
            Placement pl;
            bool inside = true;
            for (std::size_t ci = 0; ci < offsets.size(); ++ci) {
                Cell2 cell{base.first + offsets[ci].first, base.second + offsets[ci].second};
                auto it = index.find(cell);
                if (it == index.end()) {
                    inside = false;
                    break;
                }
                pl.last = std::max(pl.last, it->second);
                pl.at.emplace_back(it->second, &p.cells()[ci]);
            }
            if (inside)
                placements.push_back(std::move(pl));
        }
    }
    std::vector<std::vector<const Placement*>> at_depth(cells.size());
    for (const Placement& pl : placements)
        at_depth[static_cast<std::size_t>(pl.last)].push_back(&pl);

    const int asize = static_cast<int>(x_on_z2.alphabet().size());
    long long count = 0;
    std::vector<sft::Symbol> row(cells.size(), 0);
    std::function<void(int)> go = [&](int d) {
        if (d == static_cast<int>(cells.size())) {
            ++count;
            return;
        }
        for (sft::Symbol s = 0; s < asize; ++s) {
            row[static_cast<std::size_t>(d)] = s;
            bool ok = true;
            for (const Placement* pl : at_depth[static_cast<std::size_t>(d)]) {
                bool match = true;
                for (auto [idx, set] : pl->at)
                    if (!std::binary_search(set->begin(), set->end(),
                                            row[static_cast<std::size_t>(idx)])) {
                        match = false;
                        break;
                    }
                if (match) {
                    ok = false;
                    break;
                }
            }
            if (ok)
                go(d + 1);
        }
    };
    go(0);
    return count;
}

} // namespace oracle
