#include "sft/subshift.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <sstream>

namespace sft {

// ---------------------------------------------------------------------------
// Pattern / Sft

Pattern::Pattern(const Group& g, std::vector<Word> support,
                 std::vector<std::vector<Symbol>> cell_sets) {
    if (support.empty())
        throw input_error("pattern support must be nonempty");
    if (support.size() != cell_sets.size())
        throw input_error("pattern support and symbol sets must have equal length");
    std::vector<std::pair<Word, std::vector<Symbol>>> rows;
    rows.reserve(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
        std::vector<Symbol>& set = cell_sets[i];
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        if (set.empty())
            throw input_error("pattern cell admits no symbol");
        if (set.front() < 0)
            throw input_error("negative symbol index in pattern");
        rows.emplace_back(g.normal_form(support[i]), std::move(set));
    }
    std::sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
        return word_less(g.generators(), a.first, b.first);
    });
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        if (rows[i].first == rows[i + 1].first)
            throw input_error("pattern support cells must be pairwise distinct: '" +
                              rows[i].first.letters + "'");
    for (auto& [cell, set] : rows) {
        radius_ = std::max(radius_, static_cast<int>(cell.size()));
        support_.push_back(std::move(cell));
        cells_.push_back(std::move(set));
    }
}

Pattern Pattern::exact(const Group& g, std::vector<Word> support, std::vector<Symbol> symbols) {
    std::vector<std::vector<Symbol>> sets;
    sets.reserve(symbols.size());
    for (Symbol s : symbols)
        sets.push_back({s});
    return Pattern(g, std::move(support), std::move(sets));
}

bool Pattern::is_exact() const {
    for (const auto& set : cells_)
        if (set.size() != 1)
            return false;
    return true;
}

bool Pattern::admits(std::size_t cell, Symbol s) const {
    const auto& set = cells_[cell];
    return std::binary_search(set.begin(), set.end(), s);
}

Sft::Sft(Group group, std::vector<std::string> alphabet, std::vector<Pattern> forbidden)
    : group_(std::move(group)), alphabet_(std::move(alphabet)), forbidden_(std::move(forbidden)) {
    if (alphabet_.empty())
        throw input_error("alphabet must be nonempty");
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
        for (std::size_t j = i + 1; j < alphabet_.size(); ++j)
            if (alphabet_[i] == alphabet_[j])
                throw input_error("alphabet symbols must be distinct: '" + alphabet_[i] + "'");
    for (const Pattern& p : forbidden_) {
        for (const auto& set : p.cells())
            if (set.back() >= static_cast<Symbol>(alphabet_.size()))
                throw input_error("pattern symbol outside the alphabet");
        window_radius_ = std::max(window_radius_, p.radius());
    }
}

Symbol Sft::symbol_index(const std::string& name) const {
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
        if (alphabet_[i] == name)
            return static_cast<Symbol>(i);
    throw input_error("unknown symbol '" + name + "'");
}

// ---------------------------------------------------------------------------
// BallContext

BallContext BallContext::make(const Group& g, int radius) {
    BallContext ctx;
    ctx.radius = radius;
    ctx.cells = g.ball(radius);
    ctx.index.reserve(ctx.cells.size() * 2);
    for (int i = 0; i < static_cast<int>(ctx.cells.size()); ++i)
        ctx.index.emplace(ctx.cells[static_cast<std::size_t>(i)].letters, i);
    return ctx;
}

int BallContext::find(const Word& normal_form) const {
    auto it = index.find(normal_form.letters);
    return it == index.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// LazyConfiguration

struct LazyConfiguration::Memo {
    std::mutex m;
    std::unordered_map<std::string, Symbol> map;
};

LazyConfiguration::LazyConfiguration(Group group, std::vector<std::string> alphabet,
                                     std::function<Symbol(const Word&)> fn,
                                     std::string description)
    : group_(std::move(group)), alphabet_(std::move(alphabet)), fn_(std::move(fn)),
      description_(std::move(description)), memo_(std::make_shared<Memo>()) {
    if (alphabet_.empty())
        throw input_error("configuration alphabet must be nonempty");
}

Symbol LazyConfiguration::value(const Word& w) const {
    Word nf = group_.normal_form(w);
    {
        std::lock_guard<std::mutex> lock(memo_->m);
        auto it = memo_->map.find(nf.letters);
        if (it != memo_->map.end())
            return it->second;
    }
    Symbol s = fn_(nf);
    if (s < 0 || s >= static_cast<Symbol>(alphabet_.size()))
        throw contract_error("configuration procedure returned a symbol outside the alphabet at '" +
                             nf.letters + "'");
    std::lock_guard<std::mutex> lock(memo_->m);
    memo_->map.emplace(nf.letters, s);
    return s;
}

const std::string& LazyConfiguration::symbol_name(Symbol s) const {
    return alphabet_.at(static_cast<std::size_t>(s));
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

LazyConfiguration LazyConfiguration::constant(const Group& g, std::vector<std::string> alphabet,
                                              Symbol s) {
    if (s < 0 || s >= static_cast<Symbol>(alphabet.size()))
        throw input_error("constant symbol outside the alphabet");
    std::string desc = "{\"config\":\"constant\",\"symbol\":\"" +
                       json_escape(alphabet[static_cast<std::size_t>(s)]) + "\"}";
    return LazyConfiguration(g, std::move(alphabet), [s](const Word&) { return s; },
                             std::move(desc));
}

LazyConfiguration LazyConfiguration::parity(const Group& g, std::vector<std::string> alphabet) {
    if (alphabet.size() < 2)
        throw input_error("parity configuration needs at least two symbols");
    return LazyConfiguration(
        g, std::move(alphabet),
        [](const Word& nf) { return static_cast<Symbol>(nf.size() % 2); },
        "{\"config\":\"parity\"}");
}

// ---------------------------------------------------------------------------
// translate records and the patch enumeration engine

namespace {

struct Record {
    int ready = 0; // largest ball index involved
    std::vector<std::pair<int, const std::vector<Symbol>*>> cells;
    int pattern = -1;
    Word translate;
};

std::vector<Record> build_records(const Sft& x, const BallContext& ball) {
    std::vector<Record> out;
    const Group& g = x.group();
    std::vector<Word> translates = g.ball(ball.radius + x.window_radius());
    for (const Word& h : translates) {
        for (int pi = 0; pi < static_cast<int>(x.forbidden().size()); ++pi) {
            const Pattern& p = x.forbidden()[static_cast<std::size_t>(pi)];
            Record r;
            r.pattern = pi;
            r.translate = h;
            bool inside = true;
            for (std::size_t ci = 0; ci < p.support().size(); ++ci) {
                int idx = ball.find(g.multiply(h, p.support()[ci]));
                if (idx < 0) {
                    inside = false;
                    break;
                }
                r.ready = std::max(r.ready, idx);
                r.cells.emplace_back(idx, &p.cells()[ci]);
            }
            if (inside)
                out.push_back(std::move(r));
        }
    }
    return out;
}

bool record_matches(const Record& r, std::span<const Symbol> row) {
    for (auto [idx, set] : r.cells)
        if (!std::binary_search(set->begin(), set->end(), row[static_cast<std::size_t>(idx)]))
            return false;
    return true;
}

// Depth-first enumeration of admissible rows over the ball. `fill_order`
// gives the cell visiting order as ball indexes (the emitted rows are always
// indexed by ball position); `on_result` returns false to stop early.
void enumerate_patches_ordered(const Sft& x, int n, const EnumLimits& lim,
                               const std::vector<int>& fill_order,
                               const std::function<bool(std::span<const Symbol>)>& on_result) {
    if (n < x.window_radius())
        throw input_error("patch radius must be at least the window radius");
    BallContext ball = BallContext::make(x.group(), n);
    std::vector<int> depth_of(ball.cells.size());
    for (std::size_t d = 0; d < fill_order.size(); ++d)
        depth_of[static_cast<std::size_t>(fill_order[d])] = static_cast<int>(d);
    std::vector<Record> records = build_records(x, ball);
    std::vector<std::vector<const Record*>> at_depth(ball.cells.size());
    for (Record& r : records) {
        int ready = 0;
        for (auto [idx, set] : r.cells)
            ready = std::max(ready, depth_of[static_cast<std::size_t>(idx)]);
        at_depth[static_cast<std::size_t>(ready)].push_back(&r);
    }

    const int cells = static_cast<int>(ball.cells.size());
    const int asize = x.alphabet_size();
    std::vector<Symbol> row(static_cast<std::size_t>(cells), 0);
    std::vector<Symbol> next(static_cast<std::size_t>(cells), 0);
    std::size_t nodes = 0;
    std::size_t results = 0;
    int d = 0;
    while (d >= 0) {
        if (next[static_cast<std::size_t>(d)] >= asize) {
            next[static_cast<std::size_t>(d)] = 0;
            --d;
            if (d >= 0)
                ++next[static_cast<std::size_t>(d)];
            continue;
        }
        row[static_cast<std::size_t>(fill_order[static_cast<std::size_t>(d)])] =
            next[static_cast<std::size_t>(d)];
        if (++nodes > lim.max_nodes)
            throw capacity_error("patch enumeration exceeded the node budget");
        bool ok = true;
        for (const Record* r : at_depth[static_cast<std::size_t>(d)])
            if (record_matches(*r, row)) {
                ok = false;
                break;
            }
        if (!ok) {
            ++next[static_cast<std::size_t>(d)];
            continue;
        }
        if (d + 1 == cells) {
            if (++results > lim.max_results)
                throw capacity_error("patch enumeration exceeded the result budget");
            if (!on_result(row))
                return;
            ++next[static_cast<std::size_t>(d)];
        } else {
            ++d;
        }
    }
}

std::vector<int> identity_order(std::size_t n) {
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = static_cast<int>(i);
    return order;
}

// parent-before-child, subtree-contiguous cell order; constraints between a
// tree cell and its parent fire as soon as the cell is assigned
std::vector<int> tree_preorder(const Group& g, const std::vector<Word>& cells) {
    std::vector<int> order = identity_order(cells.size());
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const std::string& u = cells[static_cast<std::size_t>(a)].letters;
        const std::string& v = cells[static_cast<std::size_t>(b)].letters;
        std::size_t i = 0;
        while (i < u.size() && i < v.size() && u[i] == v[i])
            ++i;
        if (i == u.size() || i == v.size())
            return u.size() < v.size();
        return g.generators().index_of(u[i]) < g.generators().index_of(v[i]);
    });
    return order;
}

void enumerate_patches(const Sft& x, int n, const EnumLimits& lim,
                       const std::function<bool(std::span<const Symbol>)>& on_result) {
    BallContext ball = BallContext::make(x.group(), n);
    enumerate_patches_ordered(x, n, lim, identity_order(ball.cells.size()), on_result);
}

} // namespace

bool check_patch(const Sft& x, int n, std::span<const Symbol> patch) {
    if (n < x.window_radius())
        throw input_error("patch radius must be at least the window radius");
    BallContext ball = BallContext::make(x.group(), n);
    if (patch.size() != ball.cells.size())
        throw input_error("patch size does not match the ball");
    for (Symbol s : patch)
        if (s < 0 || s >= x.alphabet_size())
            throw input_error("patch symbol outside the alphabet");
    for (const Record& r : build_records(x, ball))
        if (record_matches(r, patch))
            return false;
    return true;
}

bool check_patch(const Sft& x, const Pattern& patch) {
    if (!patch.is_exact())
        throw input_error("patch must assign exactly one symbol per cell");
    int n = patch.radius();
    BallContext ball = BallContext::make(x.group(), n);
    if (patch.support().size() != ball.cells.size())
        throw input_error("patch support must be a full ball");
    std::vector<Symbol> row;
    row.reserve(ball.cells.size());
    for (std::size_t i = 0; i < ball.cells.size(); ++i) {
        if (patch.support()[i] != ball.cells[i])
            throw input_error("patch support must be a full ball");
        row.push_back(patch.cells()[i][0]);
    }
    return check_patch(x, n, row);
}

std::vector<std::vector<Symbol>> admissible_patch_rows(const Sft& x, int n,
                                                       const EnumLimits& lim) {
    std::vector<std::vector<Symbol>> rows;
    enumerate_patches(x, n, lim, [&rows](std::span<const Symbol> row) {
        rows.emplace_back(row.begin(), row.end());
        return true;
    });
    return rows;
}

std::vector<Pattern> admissible_patches(const Sft& x, int n, const EnumLimits& lim) {
    std::vector<Word> cells = x.group().ball(n);
    std::vector<Pattern> out;
    for (auto& row : admissible_patch_rows(x, n, lim))
        out.push_back(Pattern::exact(x.group(), cells, std::move(row)));
    return out;
}

bool has_admissible_patch(const Sft& x, int n, const EnumLimits& lim) {
    bool found = false;
    auto stop = [&found](std::span<const Symbol>) {
        found = true;
        return false;
    };
    if (x.group().kind() == Group::Kind::free) {
        // preorder keeps tree constraints adjacent to their branching point
        BallContext ball = BallContext::make(x.group(), n);
        enumerate_patches_ordered(x, n, lim, tree_preorder(x.group(), ball.cells), stop);
    } else {
        enumerate_patches(x, n, lim, stop);
    }
    return found;
}

std::size_t admissible_patch_count(const Sft& x, int n, const EnumLimits& lim) {
    std::size_t count = 0;
    enumerate_patches(x, n, lim, [&count](std::span<const Symbol>) {
        ++count;
        return true;
    });
    return count;
}

VerifyResult verify_configuration(const Sft& x, const LazyConfiguration& c, int n) {
    if (c.alphabet() != x.alphabet())
        throw input_error("configuration alphabet does not match the subshift");
    const Group& g = x.group();
    std::vector<Word> translates = g.ball(n + x.window_radius());
    for (const Word& h : translates) {
        for (int pi = 0; pi < static_cast<int>(x.forbidden().size()); ++pi) {
            const Pattern& p = x.forbidden()[static_cast<std::size_t>(pi)];
            bool match = true;
            for (std::size_t ci = 0; ci < p.support().size() && match; ++ci) {
                Word cell = g.multiply(h, p.support()[ci]);
                if (static_cast<int>(cell.size()) > n) {
                    match = false; // translate leaves the ball
                    break;
                }
                match = p.admits(ci, c.value(cell));
            }
            if (match)
                return {false, h, pi};
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// finite quotients

namespace {

struct QuotPos {
    int base;
};

void collect_positions(const Group& g, int k, std::vector<QuotPos>& out) {
    switch (g.kind()) {
    case Group::Kind::free:
    case Group::Kind::free_abelian:
        for (int i = 0; i < g.rank(); ++i)
            out.push_back({k});
        break;
    case Group::Kind::finite:
        out.push_back({g.element_count()});
        break;
    case Group::Kind::product:
        collect_positions(g.left(), k, out);
        collect_positions(g.right(), k, out);
        break;
    }
}

void fill_coords(const Group& g, int k, const Word& w, std::vector<int>& out, std::size_t& at) {
    switch (g.kind()) {
    case Group::Kind::free:
    case Group::Kind::free_abelian: {
        auto e = g.abelianized_exponents(w);
        for (long long v : e)
            out[at++] = static_cast<int>(((v % k) + k) % k);
        break;
    }
    case Group::Kind::finite:
        out[at++] = g.element_of(w);
        break;
    case Group::Kind::product: {
        std::string lw, rw;
        for (char c : w.letters) {
            if (g.left().generators().contains(c))
                lw.push_back(c);
            else if (g.right().generators().contains(c))
                rw.push_back(c);
            else
                throw input_error(std::string("unknown generator letter '") + c + "'");
        }
        fill_coords(g.left(), k, Word(std::move(lw)), out, at);
        fill_coords(g.right(), k, Word(std::move(rw)), out, at);
        break;
    }
    }
}

void compose_coords(const Group& g, int k, const std::vector<int>& a, const std::vector<int>& b,
                    std::vector<int>& out, std::size_t& at) {
    switch (g.kind()) {
    case Group::Kind::free:
    case Group::Kind::free_abelian:
        for (int i = 0; i < g.rank(); ++i, ++at)
            out[at] = (a[at] + b[at]) % k;
        break;
    case Group::Kind::finite: {
        Word wa = g.element_word(a[at]), wb = g.element_word(b[at]);
        out[at] = g.element_of(Word(wa.letters + wb.letters));
        ++at;
        break;
    }
    case Group::Kind::product:
        compose_coords(g.left(), k, a, b, out, at);
        compose_coords(g.right(), k, a, b, out, at);
        break;
    }
}

struct QuotGroupCtx {
    Group g;
    int k;
    std::vector<QuotPos> pos;
    long long size = 1;

    QuotGroupCtx(const Group& group, int modulus) : g(group), k(modulus) {
        if (k < 1)
            throw input_error("quotient modulus must be >= 1");
        collect_positions(g, k, pos);
        for (const QuotPos& p : pos)
            size *= p.base;
    }

    std::vector<int> coords_of(const Word& w) const {
        std::vector<int> out(pos.size(), 0);
        std::size_t at = 0;
        fill_coords(g, k, w, out, at);
        return out;
    }
    std::vector<int> compose(const std::vector<int>& a, const std::vector<int>& b) const {
        std::vector<int> out(pos.size(), 0);
        std::size_t at = 0;
        compose_coords(g, k, a, b, out, at);
        return out;
    }
    long long index(const std::vector<int>& coords) const {
        long long idx = 0;
        for (std::size_t i = 0; i < coords.size(); ++i)
            idx = idx * pos[i].base + coords[i];
        return idx;
    }
    std::vector<int> coords_at(long long index) const {
        std::vector<int> out(pos.size(), 0);
        for (std::size_t i = pos.size(); i-- > 0;) {
            out[i] = static_cast<int>(index % pos[i].base);
            index /= pos[i].base;
        }
        return out;
    }
};

} // namespace

long long quotient_size(const Group& g, int modulus) {
    return QuotGroupCtx(g, modulus).size;
}

long long quotient_index(const Group& g, int modulus, const Word& w) {
    QuotGroupCtx q(g, modulus);
    return q.index(q.coords_of(w));
}

LazyConfiguration config_from_witness(const Group& g, std::vector<std::string> alphabet,
                                      const WitnessData& witness) {
    if (const auto* qw = std::get_if<QuotientWitness>(&witness)) {
        if (static_cast<long long>(qw->symbols.size()) != quotient_size(g, qw->modulus))
            throw input_error("quotient witness has the wrong number of symbols");
        std::ostringstream desc;
        desc << "{\"config\":\"quotient\",\"modulus\":" << qw->modulus << ",\"symbols\":[";
        for (std::size_t i = 0; i < qw->symbols.size(); ++i)
            desc << (i ? "," : "") << "\""
                 << json_escape(alphabet.at(static_cast<std::size_t>(qw->symbols[i]))) << "\"";
        desc << "]}";
        auto shared = std::make_shared<QuotGroupCtx>(g, qw->modulus);
        std::vector<Symbol> symbols = qw->symbols;
        return LazyConfiguration(
            g, std::move(alphabet),
            [shared, symbols](const Word& nf) {
                return symbols[static_cast<std::size_t>(shared->index(shared->coords_of(nf)))];
            },
            desc.str());
    }
    const auto& tw = std::get<TreeAutomatonWitness>(witness);
    if (g.kind() != Group::Kind::free)
        throw input_error("tree-automaton witnesses require a free group");
    std::ostringstream desc;
    desc << "{\"config\":\"tree_automaton\",\"initial\":" << tw.initial << ",\"state_symbols\":[";
    for (std::size_t i = 0; i < tw.state_symbol.size(); ++i)
        desc << (i ? "," : "") << "\""
             << json_escape(alphabet.at(static_cast<std::size_t>(tw.state_symbol[i]))) << "\"";
    desc << "],\"transitions\":[";
    for (std::size_t i = 0; i < tw.next.size(); ++i) {
        desc << (i ? "," : "") << "[";
        for (std::size_t j = 0; j < tw.next[i].size(); ++j)
            desc << (j ? "," : "") << tw.next[i][j];
        desc << "]";
    }
    desc << "]}";
    TreeAutomatonWitness table = tw;
    Group group = g;
    return LazyConfiguration(
        g, std::move(alphabet),
        [table, group](const Word& nf) {
            int state = table.initial;
            for (char c : nf.letters)
                state = table.next.at(static_cast<std::size_t>(state))
                            .at(static_cast<std::size_t>(group.generators().index_of(c)));
            return table.state_symbol.at(static_cast<std::size_t>(state));
        },
        desc.str());
}

// ---------------------------------------------------------------------------
// one-dimensional helpers

namespace z1d {

bool is_line_group(const Group& g) {
    return (g.kind() == Group::Kind::free || g.kind() == Group::Kind::free_abelian) &&
           g.rank() == 1;
}

std::vector<LinearConstraint> linear_constraints(const Sft& x) {
    if (!is_line_group(x.group()))
        throw input_error("not a rank-1 group");
    std::vector<LinearConstraint> out;
    for (const Pattern& p : x.forbidden()) {
        LinearConstraint lc;
        std::vector<std::pair<int, const std::vector<Symbol>*>> cells;
        int lo = 0;
        bool first = true;
        for (std::size_t i = 0; i < p.support().size(); ++i) {
            int off = static_cast<int>(x.group().abelianized_exponents(p.support()[i])[0]);
            lo = first ? off : std::min(lo, off);
            first = false;
            cells.emplace_back(off, &p.cells()[i]);
        }
        for (auto& [off, set] : cells) {
            off -= lo;
            lc.span = std::max(lc.span, off + 1);
            lc.cells.emplace_back(off, set);
        }
        std::sort(lc.cells.begin(), lc.cells.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        out.push_back(std::move(lc));
    }
    return out;
}

std::vector<std::vector<Symbol>> admissible_words(const Sft& x, int length,
                                                  const EnumLimits& lim) {
    if (length < 1)
        throw input_error("word length must be >= 1");
    auto constraints = linear_constraints(x);
    std::vector<std::vector<std::pair<const LinearConstraint*, int>>> at_depth(
        static_cast<std::size_t>(length));
    for (const auto& lc : constraints)
        for (int start = 0; start + lc.span <= length; ++start)
            at_depth[static_cast<std::size_t>(start + lc.span - 1)].emplace_back(&lc, start);

    const int asize = x.alphabet_size();
    std::vector<Symbol> row(static_cast<std::size_t>(length), 0);
    std::vector<Symbol> next(static_cast<std::size_t>(length), 0);
    std::vector<std::vector<Symbol>> out;
    std::size_t nodes = 0;
    int d = 0;
    while (d >= 0) {
        if (next[static_cast<std::size_t>(d)] >= asize) {
            next[static_cast<std::size_t>(d)] = 0;
            --d;
            if (d >= 0)
                ++next[static_cast<std::size_t>(d)];
            continue;
        }
        row[static_cast<std::size_t>(d)] = next[static_cast<std::size_t>(d)];
        if (++nodes > lim.max_nodes)
            throw capacity_error("word enumeration exceeded the node budget");
        bool ok = true;
        for (auto [lc, start] : at_depth[static_cast<std::size_t>(d)]) {
            bool match = true;
            for (auto [off, set] : lc->cells)
                if (!std::binary_search(set->begin(), set->end(),
                                        row[static_cast<std::size_t>(start + off)])) {
                    match = false;
                    break;
                }
            if (match) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++next[static_cast<std::size_t>(d)];
            continue;
        }
        if (d + 1 == length) {
            if (out.size() >= lim.max_results)
                throw capacity_error("word enumeration exceeded the result budget");
            out.push_back(row);
            ++next[static_cast<std::size_t>(d)];
        } else {
            ++d;
        }
    }
    return out;
}

} // namespace z1d

// ---------------------------------------------------------------------------
// TreeOverlap

TreeOverlap::TreeOverlap(const Group& g, int radius)
    : g_(g), ball_(BallContext::make(g, radius)) {
    if (g.kind() != Group::Kind::free)
        throw input_error("tree overlap structure requires a free group");
    const int letters = g.generators().size();
    shared_.resize(static_cast<std::size_t>(letters));
    for (int li = 0; li < letters; ++li) {
        Word s(std::string(1, g.generators().letter(li)));
        for (int j = 0; j < static_cast<int>(ball_.cells.size()); ++j) {
            int i = ball_.find(g.multiply(s, ball_.cells[static_cast<std::size_t>(j)]));
            if (i >= 0)
                shared_[static_cast<std::size_t>(li)].emplace_back(i, j);
        }
    }
}

bool TreeOverlap::consistent(std::span<const Symbol> p, std::span<const Symbol> q,
                             int letter) const {
    for (auto [i, j] : shared_[static_cast<std::size_t>(letter)])
        if (p[static_cast<std::size_t>(i)] != q[static_cast<std::size_t>(j)])
            return false;
    return true;
}

std::vector<int> TreeOverlap::survivors(const std::vector<std::vector<Symbol>>& L) const {
    const int n = static_cast<int>(L.size());
    const int letters = static_cast<int>(shared_.size());
    std::vector<char> alive(static_cast<std::size_t>(n), 1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int p = 0; p < n; ++p) {
            if (!alive[static_cast<std::size_t>(p)])
                continue;
            for (int li = 0; li < letters; ++li) {
                bool ok = false;
                for (int q = 0; q < n && !ok; ++q)
                    ok = alive[static_cast<std::size_t>(q)] &&
                         consistent(L[static_cast<std::size_t>(p)],
                                    L[static_cast<std::size_t>(q)], li);
                if (!ok) {
                    alive[static_cast<std::size_t>(p)] = 0;
                    changed = true;
                    break;
                }
            }
        }
    }
    std::vector<int> out;
    for (int p = 0; p < n; ++p)
        if (alive[static_cast<std::size_t>(p)])
            out.push_back(p);
    return out;
}

int TreeOverlap::min_successor(const std::vector<std::vector<Symbol>>& L,
                               const std::vector<int>& alive, int p, int letter) const {
    for (int q : alive)
        if (consistent(L[static_cast<std::size_t>(p)], L[static_cast<std::size_t>(q)], letter))
            return q;
    return -1;
}

const BallContext& TreeOverlap::ball() const { return ball_; }

// ---------------------------------------------------------------------------
// emptiness oracles

namespace {

std::string row_key(const std::vector<Symbol>& row) {
    std::string s;
    s.reserve(row.size());
    for (Symbol v : row)
        s.push_back(static_cast<char>('#' + v));
    return s;
}

// Overlap-digraph oracle for rank-1 groups. Returns the lexicographically
// minimal cycle of minimal length as (period, symbols), or nullopt.
std::optional<std::pair<int, std::vector<Symbol>>> line_min_cycle(const Sft& x) {
    const int r = x.window_radius();
    const int block = std::max(1, 2 * r);
    auto blocks = z1d::admissible_words(x, block);
    if (blocks.empty())
        return std::nullopt;
    std::unordered_map<std::string, int> id;
    for (int i = 0; i < static_cast<int>(blocks.size()); ++i)
        id.emplace(row_key(blocks[static_cast<std::size_t>(i)]), i);

    auto constraints = z1d::linear_constraints(x);
    auto extended_ok = [&constraints](const std::vector<Symbol>& word) {
        for (const auto& lc : constraints)
            for (int start = 0; start + lc.span <= static_cast<int>(word.size()); ++start) {
                bool match = true;
                for (auto [off, set] : lc.cells)
                    if (!std::binary_search(set->begin(), set->end(),
                                            word[static_cast<std::size_t>(start + off)])) {
                        match = false;
                        break;
                    }
                if (match)
                    return false;
            }
        return true;
    };

    const int nn = static_cast<int>(blocks.size());
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(nn));
    for (int u = 0; u < nn; ++u) {
        for (Symbol s = 0; s < x.alphabet_size(); ++s) {
            std::vector<Symbol> v(blocks[static_cast<std::size_t>(u)].begin() + 1,
                                  blocks[static_cast<std::size_t>(u)].end());
            v.push_back(s);
            auto it = id.find(row_key(v));
            if (it == id.end())
                continue;
            std::vector<Symbol> combined = blocks[static_cast<std::size_t>(u)];
            combined.push_back(s);
            if (extended_ok(combined))
                adj[static_cast<std::size_t>(u)].push_back(it->second);
        }
        std::sort(adj[static_cast<std::size_t>(u)].begin(), adj[static_cast<std::size_t>(u)].end());
    }

    for (int k = 1; k <= nn; ++k) {
        for (int v = 0; v < nn; ++v) {
            // reach[m][u]: u -> v in exactly m steps
            std::vector<std::vector<char>> reach(static_cast<std::size_t>(k + 1),
                                                 std::vector<char>(static_cast<std::size_t>(nn), 0));
            reach[0][static_cast<std::size_t>(v)] = 1;
            for (int m = 1; m <= k; ++m)
                for (int u = 0; u < nn; ++u)
                    for (int w2 : adj[static_cast<std::size_t>(u)])
                        if (reach[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(w2)]) {
                            reach[static_cast<std::size_t>(m)][static_cast<std::size_t>(u)] = 1;
                            break;
                        }
            if (!reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)])
                continue;
            std::vector<int> path{v};
            int cur = v;
            for (int m = k; m >= 1; --m)
                for (int w2 : adj[static_cast<std::size_t>(cur)])
                    if (reach[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(w2)]) {
                        cur = w2;
                        path.push_back(cur);
                        break;
                    }
            std::vector<Symbol> symbols;
            for (int i = 0; i < k; ++i)
                symbols.push_back(
                    blocks[static_cast<std::size_t>(path[static_cast<std::size_t>(i)])][0]);
            return std::make_pair(k, std::move(symbols));
        }
    }
    return std::nullopt;
}

EmptinessCertificate emptiness_line(const Sft& x) {
    auto cyc = line_min_cycle(x);
    if (!cyc)
        return {EmptinessCertificate::Verdict::empty, x.window_radius(), std::nullopt};
    return {EmptinessCertificate::Verdict::nonempty_periodic, 0,
            WitnessData{QuotientWitness{cyc->first, cyc->second}}};
}

EmptinessCertificate emptiness_tree(const Sft& x, const EnumLimits& lim) {
    const int r = x.window_radius();
    auto rows = admissible_patch_rows(x, r, lim);
    TreeOverlap overlap(x.group(), r);
    std::vector<int> alive = overlap.survivors(rows);
    if (alive.empty())
        return {EmptinessCertificate::Verdict::empty, r, std::nullopt};
    TreeAutomatonWitness tw;
    std::vector<int> state_of(rows.size(), -1);
    for (int si = 0; si < static_cast<int>(alive.size()); ++si)
        state_of[static_cast<std::size_t>(alive[static_cast<std::size_t>(si)])] = si;
    tw.initial = 0;
    const int letters = x.group().generators().size();
    for (int p : alive) {
        tw.state_symbol.push_back(rows[static_cast<std::size_t>(p)][0]);
        std::vector<int> nx;
        for (int li = 0; li < letters; ++li)
            nx.push_back(state_of[static_cast<std::size_t>(
                overlap.min_successor(rows, alive, p, li))]);
        tw.next.push_back(std::move(nx));
    }
    return {EmptinessCertificate::Verdict::nonempty_periodic, 0, WitnessData{std::move(tw)}};
}

int group_diameter(const Group& g, int element_count) {
    int n = 0;
    while (static_cast<int>(g.ball(n).size()) < element_count)
        ++n;
    return n;
}

EmptinessCertificate emptiness_finite(const Sft& x) {
    const Group& g = x.group();
    int diam = std::max(group_diameter(g, g.element_count()), x.window_radius());
    std::optional<std::vector<Symbol>> found;
    enumerate_patches(x, diam, EnumLimits{}, [&found](std::span<const Symbol> row) {
        found.emplace(row.begin(), row.end());
        return false;
    });
    if (!found)
        return {EmptinessCertificate::Verdict::empty, diam, std::nullopt};
    BallContext ball = BallContext::make(g, diam);
    std::vector<Symbol> by_element(static_cast<std::size_t>(g.element_count()), 0);
    for (int e = 0; e < g.element_count(); ++e)
        by_element[static_cast<std::size_t>(e)] =
            (*found)[static_cast<std::size_t>(ball.find(g.element_word(e)))];
    return {EmptinessCertificate::Verdict::nonempty_periodic, 0,
            WitnessData{QuotientWitness{1, std::move(by_element)}}};
}

std::optional<std::vector<Symbol>> torus_search(const Sft& x, int k, long long max_cells,
                                                std::size_t node_budget) {
    QuotGroupCtx q(x.group(), k);
    if (q.size > max_cells)
        return std::nullopt;
    const int cells = static_cast<int>(q.size);

    struct QRecord {
        int ready = 0;
        std::vector<std::pair<int, const std::vector<Symbol>*>> at;
    };
    std::vector<QRecord> records;
    for (const Pattern& p : x.forbidden()) {
        std::vector<std::vector<int>> deltas;
        deltas.reserve(p.support().size());
        for (const Word& f : p.support())
            deltas.push_back(q.coords_of(f));
        for (long long base = 0; base < q.size; ++base) {
            QRecord rec;
            auto bc = q.coords_at(base);
            for (std::size_t ci = 0; ci < deltas.size(); ++ci) {
                int idx = static_cast<int>(q.index(q.compose(bc, deltas[ci])));
                rec.ready = std::max(rec.ready, idx);
                rec.at.emplace_back(idx, &p.cells()[ci]);
            }
            records.push_back(std::move(rec));
        }
    }
    std::vector<std::vector<const QRecord*>> at_depth(static_cast<std::size_t>(cells));
    for (const QRecord& r : records)
        at_depth[static_cast<std::size_t>(r.ready)].push_back(&r);

    const int asize = x.alphabet_size();
    std::vector<Symbol> row(static_cast<std::size_t>(cells), 0);
    std::vector<Symbol> next(static_cast<std::size_t>(cells), 0);
    std::size_t nodes = 0;
    int d = 0;
    while (d >= 0) {
        if (next[static_cast<std::size_t>(d)] >= asize) {
            next[static_cast<std::size_t>(d)] = 0;
            --d;
            if (d >= 0)
                ++next[static_cast<std::size_t>(d)];
            continue;
        }
        row[static_cast<std::size_t>(d)] = next[static_cast<std::size_t>(d)];
        if (++nodes > node_budget)
            throw capacity_error("torus search exceeded the node budget");
        bool ok = true;
        for (const QRecord* r : at_depth[static_cast<std::size_t>(d)]) {
            bool match = true;
            for (auto [idx, set] : r->at)
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
        if (!ok) {
            ++next[static_cast<std::size_t>(d)];
            continue;
        }
        if (d + 1 == cells)
            return row;
        ++d;
    }
    return std::nullopt;
}

EmptinessCertificate emptiness_semi(const Sft& x, int budget) {
    bool exhaust_alive = true;
    for (int step = 1; step <= budget; ++step) {
        try {
            if (auto row = torus_search(x, step, 4096, 40'000'000))
                return {EmptinessCertificate::Verdict::nonempty_periodic, 0,
                        WitnessData{QuotientWitness{step, std::move(*row)}}};
        } catch (const capacity_error&) {
            // inconclusive at this quotient size; keep going
        }
        if (exhaust_alive) {
            int radius = x.window_radius() + step - 1;
            try {
                EnumLimits lim;
                lim.max_nodes = 40'000'000;
                if (!has_admissible_patch(x, radius, lim))
                    return {EmptinessCertificate::Verdict::empty, radius, std::nullopt};
            } catch (const capacity_error&) {
                exhaust_alive = false;
            }
        }
    }
    return {EmptinessCertificate::Verdict::unknown, budget, std::nullopt};
}

} // namespace

bool window_set_nonempty(const Group& g, int alphabet_size, int n,
                         const std::vector<std::vector<Symbol>>& window_set) {
    (void)alphabet_size;
    if (n == 0)
        return !window_set.empty();
    if (z1d::is_line_group(g)) {
        if (window_set.empty())
            return false;
        BallContext ball = BallContext::make(g, n);
        std::vector<int> offset(ball.cells.size());
        for (std::size_t i = 0; i < ball.cells.size(); ++i)
            offset[i] = static_cast<int>(g.abelianized_exponents(ball.cells[i])[0]) + n;
        const int len = 2 * n + 1;
        std::vector<std::string> linear;
        linear.reserve(window_set.size());
        for (const auto& row : window_set) {
            std::string s(static_cast<std::size_t>(len), '?');
            for (std::size_t i = 0; i < row.size(); ++i)
                s[static_cast<std::size_t>(offset[i])] = static_cast<char>('#' + row[i]);
            linear.push_back(std::move(s));
        }
        std::unordered_map<std::string, int> node_id;
        auto node = [&node_id](std::string s) {
            auto [it, fresh] = node_id.emplace(std::move(s), static_cast<int>(node_id.size()));
            (void)fresh;
            return it->second;
        };
        std::vector<std::pair<int, int>> edges;
        for (const std::string& s : linear) {
            int u = node(s.substr(0, static_cast<std::size_t>(len - 1)));
            int v = node(s.substr(1));
            edges.emplace_back(u, v);
        }
        std::vector<std::vector<int>> adj(node_id.size());
        for (auto [u, v] : edges)
            adj[static_cast<std::size_t>(u)].push_back(v);
        std::vector<int> color(node_id.size(), 0);
        std::function<bool(int)> dfs = [&](int u) {
            color[static_cast<std::size_t>(u)] = 1;
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (color[static_cast<std::size_t>(v)] == 1)
                    return true;
                if (color[static_cast<std::size_t>(v)] == 0 && dfs(v))
                    return true;
            }
            color[static_cast<std::size_t>(u)] = 2;
            return false;
        };
        for (std::size_t u = 0; u < adj.size(); ++u)
            if (color[u] == 0 && dfs(static_cast<int>(u)))
                return true;
        return false;
    }
    if (g.kind() == Group::Kind::free) {
        TreeOverlap overlap(g, n);
        return !overlap.survivors(window_set).empty();
    }
    throw oracle_error("no exact window oracle for group " + g.description());
}

EmptinessCertificate emptiness(const Sft& x, int budget) {
    switch (x.group().kind()) {
    case Group::Kind::finite:
        return emptiness_finite(x);
    case Group::Kind::free:
        return emptiness_tree(x, EnumLimits{});
    case Group::Kind::free_abelian:
        if (x.group().rank() == 1)
            return emptiness_line(x);
        return emptiness_semi(x, budget);
    case Group::Kind::product:
        return emptiness_semi(x, budget);
    }
    throw input_error("corrupt group kind");
}

std::optional<LazyConfiguration> periodic_point_search(const Sft& x, int max_quotient) {
    const Group& g = x.group();
    switch (g.kind()) {
    case Group::Kind::free_abelian:
        for (int k = 1; k <= max_quotient; ++k)
            if (auto row = torus_search(x, k, 1'000'000, 200'000'000))
                return config_from_witness(g, x.alphabet(), QuotientWitness{k, std::move(*row)});
        return std::nullopt;
    case Group::Kind::finite: {
        auto cert = emptiness_finite(x);
        if (cert.verdict != EmptinessCertificate::Verdict::nonempty_periodic)
            return std::nullopt;
        return config_from_witness(g, x.alphabet(), *cert.witness);
    }
    case Group::Kind::free:
        if (g.rank() == 1) {
            if (auto cyc = line_min_cycle(x))
                return config_from_witness(g, x.alphabet(),
                                           QuotientWitness{cyc->first, std::move(cyc->second)});
            return std::nullopt;
        }
        return std::nullopt; // no finite-quotient search on higher-rank free groups
    case Group::Kind::product:
        throw input_error("periodic point search does not support product groups");
    }
    throw input_error("corrupt group kind");
}

// ---------------------------------------------------------------------------
// constructions

std::vector<std::string> paired_alphabet(const std::vector<std::string>& a,
                                         const std::vector<std::string>& b) {
    std::vector<std::string> out;
    out.reserve(a.size() * b.size());
    for (const std::string& x : a)
        for (const std::string& y : b)
            out.push_back("(" + x + "," + y + ")");
    return out;
}

std::vector<std::string> tagged_union_alphabet(const std::vector<std::string>& a,
                                               const std::vector<std::string>& b) {
    std::vector<std::string> out;
    out.reserve(a.size() + b.size());
    for (const std::string& x : a)
        out.push_back("l:" + x);
    for (const std::string& y : b)
        out.push_back("r:" + y);
    return out;
}

std::vector<std::string> tuple_alphabet(const std::vector<std::string>& a, int t) {
    if (t < 1)
        throw input_error("tuple width must be >= 1");
    std::vector<std::string> out{""};
    for (int i = 0; i < t; ++i) {
        std::vector<std::string> next;
        next.reserve(out.size() * a.size());
        for (const std::string& prefix : out)
            for (const std::string& s : a)
                next.push_back(prefix.empty() ? s : prefix + "," + s);
        out = std::move(next);
    }
    for (std::string& s : out)
        s = "(" + s + ")";
    return out;
}

Sft product_sft(const Sft& x, const Sft& y) {
    if (!(x.group() == y.group()))
        throw input_error("product requires subshifts over the same group");
    const int bsize = y.alphabet_size();
    const int asize = x.alphabet_size();
    std::vector<Pattern> forbidden;
    for (const Pattern& p : x.forbidden()) {
        std::vector<std::vector<Symbol>> sets;
        for (const auto& set : p.cells()) {
            std::vector<Symbol> lifted;
            lifted.reserve(set.size() * static_cast<std::size_t>(bsize));
            for (Symbol a : set)
                for (Symbol b = 0; b < bsize; ++b)
                    lifted.push_back(a * bsize + b);
            sets.push_back(std::move(lifted));
        }
        forbidden.emplace_back(x.group(), p.support(), std::move(sets));
    }
    for (const Pattern& p : y.forbidden()) {
        std::vector<std::vector<Symbol>> sets;
        for (const auto& set : p.cells()) {
            std::vector<Symbol> lifted;
            lifted.reserve(set.size() * static_cast<std::size_t>(asize));
            for (Symbol a = 0; a < asize; ++a)
                for (Symbol b : set)
                    lifted.push_back(a * bsize + b);
            sets.push_back(std::move(lifted));
        }
        forbidden.emplace_back(x.group(), p.support(), std::move(sets));
    }
    return Sft(x.group(), paired_alphabet(x.alphabet(), y.alphabet()), std::move(forbidden));
}

Sft disjoint_union_sft(const Sft& x, const Sft& y) {
    if (!(x.group() == y.group()))
        throw input_error("disjoint union requires subshifts over the same group");
    const Group& g = x.group();
    const int asize = x.alphabet_size();
    const int bsize = y.alphabet_size();
    std::vector<Pattern> forbidden;
    for (const Pattern& p : x.forbidden())
        forbidden.emplace_back(g, p.support(), p.cells());
    for (const Pattern& p : y.forbidden()) {
        std::vector<std::vector<Symbol>> sets;
        for (const auto& set : p.cells()) {
            std::vector<Symbol> shifted;
            shifted.reserve(set.size());
            for (Symbol b : set)
                shifted.push_back(asize + b);
            sets.push_back(std::move(shifted));
        }
        forbidden.emplace_back(g, p.support(), std::move(sets));
    }
    // configurations are alphabet-pure: forbid mixed pairs across every edge
    std::vector<Symbol> left_all, right_all;
    for (Symbol a = 0; a < asize; ++a)
        left_all.push_back(a);
    for (Symbol b = 0; b < bsize; ++b)
        right_all.push_back(asize + b);
    auto push_unique = [&forbidden](Pattern&& p) {
        for (const Pattern& q : forbidden)
            if (q == p)
                return;
        forbidden.push_back(std::move(p));
    };
    for (int li = 0; li < g.generators().size(); ++li) {
        Word s = g.normal_form(Word(std::string(1, g.generators().letter(li))));
        if (s.empty())
            continue; // identity generator carries no constraint
        push_unique(Pattern(g, {Word{}, s}, {left_all, right_all}));
        push_unique(Pattern(g, {Word{}, s}, {right_all, left_all}));
    }
    return Sft(g, tagged_union_alphabet(x.alphabet(), y.alphabet()), std::move(forbidden));
}

Sft intersect_sft(const Sft& x, const Sft& y) {
    if (!(x.group() == y.group()))
        throw input_error("intersection requires subshifts over the same group");
    if (x.alphabet() != y.alphabet())
        throw input_error("intersection requires equal alphabets");
    std::vector<Pattern> forbidden = x.forbidden();
    for (const Pattern& p : y.forbidden()) {
        bool dup = false;
        for (const Pattern& q : forbidden)
            if (q == p) {
                dup = true;
                break;
            }
        if (!dup)
            forbidden.push_back(p);
    }
    return Sft(x.group(), x.alphabet(), std::move(forbidden));
}

Sft stabilizer_sft(const Group& g, std::vector<std::string> alphabet, const Word& w) {
    Word wn = g.normal_form(w);
    if (wn.empty())
        throw input_error("stabilizer of the identity constrains nothing; give a nontrivial word");
    Word winv = g.inverse_word(wn);
    const int asize = static_cast<int>(alphabet.size());
    std::vector<Pattern> forbidden;
    for (Symbol a = 0; a < asize; ++a)
        for (Symbol b = 0; b < asize; ++b)
            if (a != b)
                forbidden.push_back(Pattern::exact(g, {Word{}, winv}, {a, b}));
    return Sft(g, std::move(alphabet), std::move(forbidden));
}

} // namespace sft
