#include "sft/synthesis.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

namespace sft {

// ---------------------------------------------------------------------------
// NearestNeighborTreeSft

NearestNeighborTreeSft::NearestNeighborTreeSft(
    Group free_group, std::vector<std::string> alphabet,
    const std::vector<std::tuple<char, Symbol, Symbol>>& forbidden_pairs)
    : group_(std::move(free_group)), alphabet_(std::move(alphabet)) {
    if (group_.kind() != Group::Kind::free)
        throw input_error("nearest-neighbour tree systems require a free group");
    // an empty alphabet is allowed: it arises from recoding empty subshifts
    const int letters = group_.generators().size();
    const int asize = alphabet_size();
    allowed_.assign(static_cast<std::size_t>(letters),
                    std::vector<std::vector<char>>(static_cast<std::size_t>(asize),
                                                   std::vector<char>(static_cast<std::size_t>(asize), 1)));
    for (auto [s, a, b] : forbidden_pairs) {
        int li = group_.generators().index_of(s);
        if (li < 0)
            throw input_error(std::string("unknown generator letter '") + s + "'");
        if (a < 0 || a >= asize || b < 0 || b >= asize)
            throw input_error("forbidden pair symbol outside the alphabet");
        int lj = group_.generators().index_of(group_.generators().inverse(s));
        allowed_[static_cast<std::size_t>(li)][static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 0;
        allowed_[static_cast<std::size_t>(lj)][static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = 0;
    }
}

NearestNeighborTreeSft NearestNeighborTreeSft::from_allowed(
    Group free_group, std::vector<std::string> alphabet,
    std::vector<std::vector<std::vector<char>>> allowed) {
    NearestNeighborTreeSft out(std::move(free_group), std::move(alphabet), {});
    const int letters = out.group_.generators().size();
    const int asize = out.alphabet_size();
    if (static_cast<int>(allowed.size()) != letters)
        throw input_error("one relation per generator letter required");
    for (int li = 0; li < letters; ++li) {
        int lj = out.group_.generators().index_of(
            out.group_.generators().inverse(out.group_.generators().letter(li)));
        for (Symbol a = 0; a < asize; ++a)
            for (Symbol b = 0; b < asize; ++b) {
                char v = allowed[static_cast<std::size_t>(li)][static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] &&
                         allowed[static_cast<std::size_t>(lj)][static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
                out.allowed_[static_cast<std::size_t>(li)][static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
            }
    }
    return out;
}

std::optional<NearestNeighborTreeSft> NearestNeighborTreeSft::from_sft(const Sft& x) {
    if (x.group().kind() != Group::Kind::free)
        return std::nullopt;
    std::vector<std::tuple<char, Symbol, Symbol>> pairs;
    std::vector<Symbol> dead;
    for (const Pattern& p : x.forbidden()) {
        if (p.support().size() == 1 && p.support()[0].empty()) {
            for (Symbol a : p.cells()[0])
                dead.push_back(a);
            continue;
        }
        if (p.support().size() == 2 && p.support()[0].empty() && p.support()[1].size() == 1) {
            char s = p.support()[1].letters[0];
            for (Symbol a : p.cells()[0])
                for (Symbol b : p.cells()[1])
                    pairs.emplace_back(s, a, b);
            continue;
        }
        return std::nullopt;
    }
    for (Symbol a : dead)
        for (int li = 0; li < x.group().generators().size(); ++li) {
            char s = x.group().generators().letter(li);
            for (Symbol b = 0; b < x.alphabet_size(); ++b) {
                pairs.emplace_back(s, a, b);
                pairs.emplace_back(s, b, a);
            }
        }
    return NearestNeighborTreeSft(x.group(), x.alphabet(), pairs);
}

bool NearestNeighborTreeSft::allowed(int letter_index, Symbol a, Symbol b) const {
    return allowed_[static_cast<std::size_t>(letter_index)][static_cast<std::size_t>(a)]
                   [static_cast<std::size_t>(b)] != 0;
}

Sft NearestNeighborTreeSft::to_sft() const {
    std::vector<Pattern> forbidden;
    for (int li = 0; li < group_.generators().size(); ++li) {
        Word s(std::string(1, group_.generators().letter(li)));
        for (Symbol a = 0; a < alphabet_size(); ++a)
            for (Symbol b = 0; b < alphabet_size(); ++b)
                if (!allowed(li, a, b))
                    forbidden.push_back(Pattern::exact(group_, {Word{}, s}, {a, b}));
    }
    return Sft(group_, alphabet_, std::move(forbidden));
}

std::vector<Symbol> prune_alive(const NearestNeighborTreeSft& x) {
    const int asize = x.alphabet_size();
    const int letters = x.group().generators().size();
    std::vector<char> alive(static_cast<std::size_t>(asize), 1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (Symbol a = 0; a < asize; ++a) {
            if (!alive[static_cast<std::size_t>(a)])
                continue;
            for (int li = 0; li < letters; ++li) {
                bool ok = false;
                for (Symbol b = 0; b < asize && !ok; ++b)
                    ok = alive[static_cast<std::size_t>(b)] && x.allowed(li, a, b);
                if (!ok) {
                    alive[static_cast<std::size_t>(a)] = 0;
                    changed = true;
                    break;
                }
            }
        }
    }
    std::vector<Symbol> out;
    for (Symbol a = 0; a < asize; ++a)
        if (alive[static_cast<std::size_t>(a)])
            out.push_back(a);
    return out;
}

LazyConfiguration greedy_tree_point(const NearestNeighborTreeSft& x) {
    std::vector<Symbol> alive = prune_alive(x);
    if (alive.empty())
        throw emptiness_error("the nearest-neighbour system is empty");
    NearestNeighborTreeSft sys = x;
    Group g = x.group();
    struct Memo {
        std::mutex m;
        std::unordered_map<std::string, Symbol> map;
    };
    auto memo = std::make_shared<Memo>();
    return LazyConfiguration(
        g, x.alphabet(),
        [sys, g, alive, memo](const Word& nf) {
            std::lock_guard<std::mutex> lock(memo->m);
            // walk the prefix chain from the root, filling the memo
            Symbol cur = alive[0];
            std::string prefix;
            for (char c : nf.letters) {
                auto it = memo->map.find(prefix);
                if (it != memo->map.end())
                    cur = it->second;
                else
                    memo->map.emplace(prefix, cur);
                int li = g.generators().index_of(c);
                Symbol next = -1;
                for (Symbol b : alive)
                    if (sys.allowed(li, cur, b)) {
                        next = b;
                        break;
                    }
                prefix.push_back(c);
                cur = next; // pruning guarantees next >= 0
            }
            auto it = memo->map.find(prefix);
            if (it != memo->map.end())
                return it->second;
            memo->map.emplace(prefix, cur);
            return cur;
        },
        "{\"config\":\"greedy_tree_point\"}");
}

NnRecode nn_recode(const Sft& x, int radius, const EnumLimits& lim) {
    if (x.group().kind() != Group::Kind::free)
        throw input_error("nearest-neighbour recoding requires a free group");
    if (radius < x.window_radius())
        throw input_error("recoding radius must be at least the window radius");
    std::vector<std::vector<Symbol>> rows = admissible_patch_rows(x, radius, lim);
    TreeOverlap overlap(x.group(), radius);
    const int letters = x.group().generators().size();
    std::vector<std::string> names;
    names.reserve(rows.size());
    for (const auto& row : rows) {
        std::string name = "(";
        for (std::size_t i = 0; i < row.size(); ++i) {
            name += (i ? "," : "");
            name += x.alphabet()[static_cast<std::size_t>(row[i])];
        }
        name += ")";
        names.push_back(std::move(name));
    }
    std::vector<std::vector<std::vector<char>>> allowed(
        static_cast<std::size_t>(letters),
        std::vector<std::vector<char>>(rows.size(), std::vector<char>(rows.size(), 0)));
    for (int li = 0; li < letters; ++li)
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < rows.size(); ++j)
                allowed[static_cast<std::size_t>(li)][i][j] =
                    overlap.consistent(rows[i], rows[j], li) ? 1 : 0;
    return NnRecode{NearestNeighborTreeSft::from_allowed(x.group(), std::move(names),
                                                         std::move(allowed)),
                    std::move(rows), radius};
}

LazyConfiguration decoded_greedy_point(const NnRecode& rc,
                                       std::vector<std::string> base_alphabet) {
    LazyConfiguration states = greedy_tree_point(rc.recoded);
    std::vector<std::vector<Symbol>> rows = rc.state_rows;
    std::string desc = "{\"config\":\"greedy_decoded\",\"radius\":" + std::to_string(rc.radius) + "}";
    return LazyConfiguration(
        rc.recoded.group(), std::move(base_alphabet),
        [states, rows](const Word& nf) {
            return rows[static_cast<std::size_t>(states.value(nf))][0]; // centre cell
        },
        std::move(desc));
}

// ---------------------------------------------------------------------------
// minimal window sets

std::vector<WindowPattern> minimal_allowed_set(std::vector<WindowPattern> D,
                                               const WindowOracle& nonempty) {
    if (!nonempty(D))
        throw emptiness_error("the window set already defines an empty subshift");
    std::vector<WindowPattern> current = std::move(D);
    std::size_t i = 0;
    while (i < current.size()) {
        std::vector<WindowPattern> candidate;
        candidate.reserve(current.size() - 1);
        for (std::size_t j = 0; j < current.size(); ++j)
            if (j != i)
                candidate.push_back(current[j]);
        if (nonempty(candidate))
            current = std::move(candidate); // keep scanning from the same index
        else
            ++i;
    }
    return current;
}

std::vector<WindowPattern> minimal_allowed_set(const Group& g, int alphabet_size, int n,
                                               std::vector<WindowPattern> D) {
    std::sort(D.begin(), D.end());
    Group group = g;
    return minimal_allowed_set(std::move(D),
                               [group, alphabet_size, n](const std::vector<WindowPattern>& L) {
                                   return window_set_nonempty(group, alphabet_size, n, L);
                               });
}

// ---------------------------------------------------------------------------
// DominoChain

namespace {

// permutation taking ball order to the chain's cell order
std::vector<int> cell_order(const Group& g, const std::vector<Word>& ball_cells) {
    std::vector<int> order(ball_cells.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<int>(i);
    if (z1d::is_line_group(g)) {
        std::vector<long long> offset(ball_cells.size());
        for (std::size_t i = 0; i < ball_cells.size(); ++i)
            offset[i] = g.abelianized_exponents(ball_cells[i])[0];
        std::sort(order.begin(), order.end(),
                  [&offset](int a, int b) { return offset[static_cast<std::size_t>(a)] <
                                                   offset[static_cast<std::size_t>(b)]; });
    }
    return order;
}

} // namespace

struct DominoChain::State {
    std::mutex m;
    // per level i (radius n0 + i):
    std::vector<std::vector<WindowPattern>> levels;   // rows in chain cell order
    std::vector<WindowPattern> patches;               // chain cell order
    std::vector<std::vector<int>> orders;             // ball index per chain position
    std::vector<BallContext> balls;
    bool tree_mode = false; // free-group extension beyond the last level
    // tree extension data
    std::vector<std::vector<Symbol>> survivor_rows;   // admissible rows at n0 (ball order)
    std::vector<int> survivor_alive;
    std::unordered_map<std::string, int> cell_state;  // frontier and beyond
    std::shared_ptr<TreeOverlap> overlap;
};

DominoChain::DominoChain(Sft x, std::size_t level_capacity)
    : x_(std::move(x)), n0_(x_.window_radius()), level_capacity_(level_capacity),
      state_(std::make_shared<State>()) {
    const Group& g = x_.group();
    bool line = z1d::is_line_group(g);
    bool tree = g.kind() == Group::Kind::free;
    if (!line && !tree)
        throw oracle_error("domino-guided extraction needs an exact oracle; group " +
                           g.description() + " has none");
    std::lock_guard<std::mutex> lock(state_->m);

    BallContext ball = BallContext::make(g, n0_);
    std::vector<int> order = cell_order(g, ball.cells);
    std::vector<WindowPattern> D;
    for (const auto& row : admissible_patch_rows(x_, n0_)) {
        WindowPattern p(order.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            p[i] = row[static_cast<std::size_t>(order[i])];
        D.push_back(std::move(p));
    }
    std::sort(D.begin(), D.end());

    Group group = g;
    int asize = x_.alphabet_size();
    auto oracle = [group, asize, &order, this](const std::vector<WindowPattern>& L) {
        // convert back to ball order for the window oracle
        std::vector<WindowPattern> ball_rows;
        ball_rows.reserve(L.size());
        for (const auto& p : L) {
            WindowPattern b(p.size());
            for (std::size_t i = 0; i < p.size(); ++i)
                b[static_cast<std::size_t>(order[i])] = p[i];
            ball_rows.push_back(std::move(b));
        }
        return window_set_nonempty(group, asize, n0_, ball_rows);
    };
    if (D.empty() || !oracle(D))
        throw emptiness_error("the subshift is empty; nothing to extract");
    std::vector<WindowPattern> L0 = minimal_allowed_set(std::move(D), oracle);
    state_->levels.push_back(L0);
    state_->patches.push_back(L0.front());
    state_->orders.push_back(std::move(order));
    state_->balls.push_back(std::move(ball));
}

int DominoChain::depth() const { return n0_ + static_cast<int>(state_->levels.size()) - 1; }

void DominoChain::grow_locked(int n) {
    const Group& g = x_.group();
    while (n0_ + static_cast<int>(state_->levels.size()) - 1 < n) {
        if (state_->tree_mode)
            return;
        int level = static_cast<int>(state_->levels.size());
        int radius = n0_ + level;
        BallContext ball = BallContext::make(g, radius);
        std::vector<int> order = cell_order(g, ball.cells);
        const std::vector<WindowPattern>& prev = state_->levels.back();
        const std::vector<int>& prev_order = state_->orders.back();
        std::size_t prev_cells = prev_order.size();
        std::size_t new_cells = ball.cells.size() - prev_cells;
        double dsize = static_cast<double>(prev.size());
        for (std::size_t i = 0; i < new_cells; ++i)
            dsize *= x_.alphabet_size();
        if (dsize > static_cast<double>(level_capacity_)) {
            if (g.kind() == Group::Kind::free) {
                // survivor automaton extension beyond the chain
                state_->survivor_rows = admissible_patch_rows(x_, n0_);
                state_->overlap = std::make_shared<TreeOverlap>(g, n0_);
                state_->survivor_alive = state_->overlap->survivors(state_->survivor_rows);
                state_->tree_mode = true;
                return;
            }
            throw capacity_error("window chain level exceeded the capacity budget");
        }

        // positions of the previous window inside the new cell order
        std::unordered_map<std::string, int> prev_pos;
        for (std::size_t i = 0; i < prev_cells; ++i)
            prev_pos.emplace(
                state_->balls.back().cells[static_cast<std::size_t>(prev_order[i])].letters,
                static_cast<int>(i));
        std::vector<int> embed(ball.cells.size(), -1); // chain position -> prev position
        std::vector<int> fresh;                        // chain positions new at this level
        for (std::size_t i = 0; i < ball.cells.size(); ++i) {
            const Word& cell = ball.cells[static_cast<std::size_t>(order[i])];
            auto it = prev_pos.find(cell.letters);
            if (it != prev_pos.end())
                embed[i] = it->second;
            else
                fresh.push_back(static_cast<int>(i));
        }

        std::vector<WindowPattern> D;
        for (const WindowPattern& q : prev) {
            WindowPattern base(ball.cells.size(), -1);
            for (std::size_t i = 0; i < ball.cells.size(); ++i)
                if (embed[i] >= 0)
                    base[i] = q[static_cast<std::size_t>(embed[i])];
            // enumerate the fresh cells
            std::vector<Symbol> tail(fresh.size(), 0);
            while (true) {
                WindowPattern p = base;
                for (std::size_t i = 0; i < fresh.size(); ++i)
                    p[static_cast<std::size_t>(fresh[i])] = tail[i];
                D.push_back(std::move(p));
                int i = static_cast<int>(tail.size()) - 1;
                while (i >= 0 && tail[static_cast<std::size_t>(i)] == x_.alphabet_size() - 1)
                    tail[static_cast<std::size_t>(i--)] = 0;
                if (i < 0)
                    break;
                ++tail[static_cast<std::size_t>(i)];
            }
        }
        std::sort(D.begin(), D.end());
        D.erase(std::unique(D.begin(), D.end()), D.end());

        Group group = g;
        int asize = x_.alphabet_size();
        auto oracle = [group, asize, radius, &order](const std::vector<WindowPattern>& L) {
            std::vector<WindowPattern> ball_rows;
            ball_rows.reserve(L.size());
            for (const auto& p : L) {
                WindowPattern b(p.size());
                for (std::size_t i = 0; i < p.size(); ++i)
                    b[static_cast<std::size_t>(order[i])] = p[i];
                ball_rows.push_back(std::move(b));
            }
            return window_set_nonempty(group, asize, radius, ball_rows);
        };
        std::vector<WindowPattern> L = minimal_allowed_set(std::move(D), oracle);

        // lexicographically minimal member extending the previous patch
        const WindowPattern& prev_patch = state_->patches.back();
        const WindowPattern* chosen = nullptr;
        for (const WindowPattern& p : L) {
            bool extends = true;
            for (std::size_t i = 0; i < ball.cells.size() && extends; ++i)
                if (embed[i] >= 0)
                    extends = p[i] == prev_patch[static_cast<std::size_t>(embed[i])];
            if (extends) {
                chosen = &p;
                break;
            }
        }
        if (!chosen)
            throw std::runtime_error("window chain lost its patch; minimality argument violated");
        state_->patches.push_back(*chosen);
        state_->levels.push_back(std::move(L));
        state_->orders.push_back(std::move(order));
        state_->balls.push_back(std::move(ball));
    }
}

void DominoChain::grow_to(int n) {
    std::lock_guard<std::mutex> lock(state_->m);
    grow_locked(n);
}

std::vector<WindowPattern> DominoChain::level(int n) {
    std::lock_guard<std::mutex> lock(state_->m);
    grow_locked(n);
    return state_->levels.at(static_cast<std::size_t>(n - n0_));
}

WindowPattern DominoChain::patch(int n) {
    std::lock_guard<std::mutex> lock(state_->m);
    grow_locked(n);
    return state_->patches.at(static_cast<std::size_t>(n - n0_));
}

Symbol DominoChain::tree_extension_value(const Word& nf) {
    // states live on cells at depth >= frontier = N - n0
    const Group& g = x_.group();
    State& st = *state_;
    int last = static_cast<int>(st.levels.size()) - 1;
    int big_n = n0_ + last;
    int frontier = big_n - n0_;
    std::unordered_map<std::string, int> row_index;
    // resolve the state of a cell, walking down from the frontier ancestor
    std::function<int(const Word&)> state_of = [&](const Word& cell) -> int {
        auto it = st.cell_state.find(cell.letters);
        if (it != st.cell_state.end())
            return it->second;
        int d = static_cast<int>(cell.size());
        int result = -1;
        if (d == frontier) {
            // restriction of the deepest patch to the ball around this cell
            const BallContext& nb = st.overlap->ball();
            WindowPattern row(nb.cells.size());
            const BallContext& big = st.balls.back();
            const std::vector<int>& order = st.orders.back();
            std::vector<int> pos_of_ball(big.cells.size());
            for (std::size_t i = 0; i < order.size(); ++i)
                pos_of_ball[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
            for (std::size_t i = 0; i < nb.cells.size(); ++i) {
                Word abs = g.multiply(cell, nb.cells[i]);
                int bi = big.find(abs);
                if (bi < 0)
                    throw std::runtime_error("frontier cell leaves the chain ball");
                row[i] = st.patches.back()[static_cast<std::size_t>(pos_of_ball[static_cast<std::size_t>(bi)])];
            }
            // identify the row among the admissible rows
            if (row_index.empty())
                for (int i = 0; i < static_cast<int>(st.survivor_rows.size()); ++i) {
                    std::string key;
                    for (Symbol v : st.survivor_rows[static_cast<std::size_t>(i)])
                        key.push_back(static_cast<char>('#' + v));
                    row_index.emplace(std::move(key), i);
                }
            std::string key;
            for (Symbol v : row)
                key.push_back(static_cast<char>('#' + v));
            auto rit = row_index.find(key);
            if (rit == row_index.end())
                throw std::runtime_error("frontier pattern is not admissible");
            result = rit->second;
        } else {
            Word parent(cell.letters.substr(0, cell.letters.size() - 1));
            char s = cell.letters.back();
            int parent_state = state_of(parent);
            result = st.overlap->min_successor(st.survivor_rows, st.survivor_alive, parent_state,
                                               g.generators().index_of(s));
            if (result < 0)
                throw std::runtime_error("survivor automaton has no successor");
        }
        st.cell_state.emplace(cell.letters, result);
        return result;
    };
    int stv = state_of(nf);
    return st.survivor_rows[static_cast<std::size_t>(stv)][0];
}

Symbol DominoChain::value(const Word& normal_form) {
    std::lock_guard<std::mutex> lock(state_->m);
    int need = std::max(n0_, static_cast<int>(normal_form.size()));
    grow_locked(need);
    int have = n0_ + static_cast<int>(state_->levels.size()) - 1;
    if (static_cast<int>(normal_form.size()) <= have) {
        const BallContext& ball = state_->balls.back();
        const std::vector<int>& order = state_->orders.back();
        int bi = ball.find(normal_form);
        for (std::size_t i = 0; i < order.size(); ++i)
            if (order[i] == bi)
                return state_->patches.back()[i];
        throw std::runtime_error("cell not found in the chain ball");
    }
    return tree_extension_value(normal_form);
}

DominoPoint domino_guided_point(const Sft& x, std::size_t level_capacity) {
    auto chain = std::make_shared<DominoChain>(x, level_capacity);
    LazyConfiguration config(
        x.group(), x.alphabet(),
        [chain](const Word& nf) { return chain->value(nf); },
        "{\"config\":\"domino_guided_point\"}");
    return {chain, std::move(config)};
}

// ---------------------------------------------------------------------------
// finite-orbit points

LazyConfiguration finite_orbit_point(const Homomorphism& phi, std::vector<Symbol> y0,
                                     std::vector<std::string> alphabet) {
    const Group& k = phi.target();
    if (k.kind() != Group::Kind::finite)
        throw input_error("finite-orbit points need a finite target group");
    if (static_cast<int>(y0.size()) != k.element_count())
        throw input_error("need one symbol per element of the finite group");
    for (Symbol s : y0)
        if (s < 0 || s >= static_cast<Symbol>(alphabet.size()))
            throw input_error("finite-orbit symbol outside the alphabet");
    Homomorphism hom = phi;
    Group target = k;
    std::string desc = "{\"config\":\"finite_orbit\",\"symbols\":[";
    for (std::size_t i = 0; i < y0.size(); ++i)
        desc += (i ? "," : "") + std::string("\"") +
                json_escape(alphabet[static_cast<std::size_t>(y0[i])]) + "\"";
    desc += "]}";
    std::vector<Symbol> table = y0;
    return LazyConfiguration(
        phi.source(), std::move(alphabet),
        [hom, target, table](const Word& nf) {
            return table[static_cast<std::size_t>(target.element_of(hom.apply(nf)))];
        },
        std::move(desc));
}

} // namespace sft
