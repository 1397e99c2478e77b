#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>
#include <thread>

#include "oracles.hpp"
#include "sft/subshift.hpp"

using namespace sft;

namespace {

Group zline() { return Group::free_abelian(1); }

Word w(const char* s) { return Word(std::string(s)); }

// forbidden words on consecutive cells, e.g. {"11"} = golden mean
Sft z_sft(const Group& z, int asize, const std::vector<std::string>& words) {
    std::vector<std::string> alphabet;
    for (int i = 0; i < asize; ++i)
        alphabet.push_back(std::to_string(i));
    std::vector<Pattern> forbidden;
    for (const std::string& word : words) {
        std::vector<Word> support;
        std::vector<Symbol> syms;
        for (std::size_t j = 0; j < word.size(); ++j) {
            support.emplace_back(std::string(j, 'a'));
            syms.push_back(word[j] - '0');
        }
        forbidden.push_back(Pattern::exact(z, support, syms));
    }
    return Sft(z, alphabet, forbidden);
}

Sft golden(const Group& z) { return z_sft(z, 2, {"11"}); }

// F2 SFT forbidding (1,1) across every generator direction
Sft f2_golden_pairs(const Group& f2) {
    std::vector<Pattern> forbidden;
    for (int li = 0; li < f2.generators().size(); ++li)
        forbidden.push_back(Pattern::exact(
            f2, {Word{}, Word(std::string(1, f2.generators().letter(li)))}, {1, 1}));
    return Sft(f2, {"0", "1"}, forbidden);
}

std::vector<oracle::Row> forbidden_rows(const std::vector<std::string>& words) {
    std::vector<oracle::Row> rows;
    for (const std::string& word : words) {
        oracle::Row r;
        for (char c : word)
            r.push_back(c - '0');
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace

TEST_CASE("pattern canonicalization") {
    Group z = zline();
    Pattern p = Pattern::exact(z, {w("a"), w("")}, {1, 0});
    CHECK(p.support()[0] == w(""));
    CHECK(p.support()[1] == w("a"));
    CHECK(p.cells()[0][0] == 0);
    CHECK(p.cells()[1][0] == 1);
    CHECK(p.radius() == 1);
    CHECK(p.is_exact());
    CHECK_THROWS_AS(Pattern::exact(z, {w("a"), w("aAa")}, {0, 1}), input_error);
    CHECK_THROWS_AS(Pattern(z, {w("")}, {{}}), input_error);
}

TEST_CASE("check_patch examples") {
    Group z = zline();
    Sft x = golden(z);
    auto alternating = oracle::linear_to_ball(z, 2, {0, 1, 0, 1, 0});
    CHECK(check_patch(x, 2, alternating));
    auto bad = oracle::linear_to_ball(z, 2, {0, 1, 1, 0, 0});
    CHECK_FALSE(check_patch(x, 2, bad));

    Group f2 = Group::free_group("ab");
    Sft xf = f2_golden_pairs(f2);
    std::vector<Symbol> zeros(f2.ball(3).size(), 0);
    CHECK(check_patch(xf, 3, zeros));

    CHECK_THROWS_AS(check_patch(x, 0, std::vector<Symbol>{0}), input_error);
}

TEST_CASE("admissible patch counts") {
    Group z = zline();
    CHECK(admissible_patch_count(golden(z), 2) == 13); // Fibonacci F(7)
    CHECK(admissible_patch_count(z_sft(z, 2, {}), 1) == 8);
    CHECK(admissible_patch_count(z_sft(z, 2, {"0", "1"}), 1) == 0);
}

TEST_CASE("admissible patches against brute enumeration") {
    Group z = zline();
    std::mt19937 rng(21);
    for (int t = 0; t < 25; ++t) {
        auto inst = oracle::random_z_sft(rng, z);
        for (int n = 1; n <= 3; ++n) {
            if (n < inst.sft.window_radius())
                continue;
            long long expect = oracle::count_words(inst.asize, 2 * n + 1, inst.forbidden_words);
            CHECK(static_cast<long long>(admissible_patch_count(inst.sft, n)) == expect);
        }
    }
}

TEST_CASE("enumeration is deterministic and lexicographic") {
    Group z = zline();
    Sft x = golden(z);
    auto rows1 = admissible_patch_rows(x, 2);
    auto rows2 = admissible_patch_rows(x, 2);
    CHECK(rows1 == rows2);
    CHECK(std::is_sorted(rows1.begin(), rows1.end()));
}

TEST_CASE("admissible words follow the Fibonacci counts") {
    Group z = zline();
    Sft x = golden(z);
    long long a = 2, b = 3;
    for (int n = 1; n <= 12; ++n) {
        auto words = z1d::admissible_words(x, n);
        long long expect = (n == 1) ? 2 : (n == 2 ? 3 : [&] {
            long long c = a + b;
            a = b;
            b = c;
            return c;
        }());
        CHECK(static_cast<long long>(words.size()) == expect);
    }
}

TEST_CASE("emptiness on the line") {
    Group z = zline();
    auto cert = emptiness(golden(z));
    REQUIRE(cert.verdict == EmptinessCertificate::Verdict::nonempty_periodic);
    const auto& qw = std::get<QuotientWitness>(*cert.witness);
    CHECK(qw.modulus == 1);
    CHECK(qw.symbols == std::vector<Symbol>{0});

    auto cert2 = emptiness(z_sft(z, 2, {"0", "11"}));
    CHECK(cert2.verdict == EmptinessCertificate::Verdict::empty);

    // alternating-only subshift: minimal period 2
    auto cert3 = emptiness(z_sft(z, 2, {"00", "11"}));
    REQUIRE(cert3.verdict == EmptinessCertificate::Verdict::nonempty_periodic);
    CHECK(std::get<QuotientWitness>(*cert3.witness).modulus == 2);
}

TEST_CASE("line oracle matches brute force on random instances") {
    Group z = zline();
    std::mt19937 rng(31);
    for (int t = 0; t < 60; ++t) {
        auto inst = oracle::random_z_sft(rng, z);
        bool expect = oracle::brute_nonempty_z(inst.asize, inst.forbidden_words);
        auto cert = emptiness(inst.sft);
        REQUIRE(cert.verdict != EmptinessCertificate::Verdict::unknown);
        CHECK((cert.verdict == EmptinessCertificate::Verdict::nonempty_periodic) == expect);
        if (cert.verdict == EmptinessCertificate::Verdict::nonempty_periodic) {
            auto cfg = config_from_witness(z, inst.sft.alphabet(), *cert.witness);
            int radius = std::get<QuotientWitness>(*cert.witness).modulus +
                         inst.sft.window_radius();
            CHECK(verify_configuration(inst.sft, cfg, radius).ok);
        }
    }
}

TEST_CASE("free-group emptiness via pruning") {
    Group f2 = Group::free_group("ab");
    auto cert = emptiness(f2_golden_pairs(f2));
    REQUIRE(cert.verdict == EmptinessCertificate::Verdict::nonempty_periodic);
    auto cfg = config_from_witness(f2, {"0", "1"}, *cert.witness);
    CHECK(verify_configuration(f2_golden_pairs(f2), cfg, 4).ok);

    // every pair forbidden: empty
    std::vector<Pattern> all;
    for (int li = 0; li < f2.generators().size(); ++li)
        for (Symbol a = 0; a < 2; ++a)
            for (Symbol b = 0; b < 2; ++b)
                all.push_back(Pattern::exact(
                    f2, {Word{}, Word(std::string(1, f2.generators().letter(li)))}, {a, b}));
    CHECK(emptiness(Sft(f2, {"0", "1"}, all)).verdict == EmptinessCertificate::Verdict::empty);
}

TEST_CASE("free-group pruning agrees with patch exhaustion") {
    Group f2 = Group::free_group("ab");
    std::mt19937 rng(17);
    for (int t = 0; t < 30; ++t) {
        // random nearest-neighbour instance
        std::vector<Pattern> forbidden;
        for (int li = 0; li < f2.generators().size(); ++li) {
            char c = f2.generators().letter(li);
            if (f2.generators().index_of(f2.generators().inverse(c)) < li)
                continue; // transpose handled by its partner letter
            for (Symbol a = 0; a < 2; ++a)
                for (Symbol b = 0; b < 2; ++b)
                    if (oracle::rnd(rng, 100) < 35) {
                        forbidden.push_back(
                            Pattern::exact(f2, {Word{}, Word(std::string(1, c))}, {a, b}));
                        forbidden.push_back(Pattern::exact(
                            f2, {Word{}, Word(std::string(1, f2.generators().inverse(c)))},
                            {b, a}));
                    }
        }
        Sft x(f2, {"0", "1"}, forbidden);
        bool nonempty = emptiness(x).verdict == EmptinessCertificate::Verdict::nonempty_periodic;
        CHECK(nonempty == has_admissible_patch(x, 3));
    }
}

TEST_CASE("two-dimensional semi-oracle") {
    Group g2 = Group::free_abelian(2);
    // full singleton shift: period 1x1
    Sft full1(g2, {"0"}, {});
    auto cert = emptiness(full1);
    REQUIRE(cert.verdict == EmptinessCertificate::Verdict::nonempty_periodic);
    CHECK(std::get<QuotientWitness>(*cert.witness).modulus == 1);

    // obviously empty
    Sft dead(g2, {"0", "1"},
             {Pattern::exact(g2, {w("")}, {0}), Pattern::exact(g2, {w("")}, {1})});
    CHECK(emptiness(dead).verdict == EmptinessCertificate::Verdict::empty);

    // checkerboard-only: minimal torus 2
    std::vector<Pattern> eq;
    for (Symbol s = 0; s < 2; ++s) {
        eq.push_back(Pattern::exact(g2, {w(""), w("a")}, {s, s}));
        eq.push_back(Pattern::exact(g2, {w(""), w("b")}, {s, s}));
    }
    auto cb = emptiness(Sft(g2, {"0", "1"}, eq));
    REQUIRE(cb.verdict == EmptinessCertificate::Verdict::nonempty_periodic);
    CHECK(std::get<QuotientWitness>(*cb.witness).modulus == 2);
    auto cfg = config_from_witness(g2, {"0", "1"}, *cb.witness);
    CHECK(verify_configuration(Sft(g2, {"0", "1"}, eq), cfg, 4).ok);
}

TEST_CASE("semi-oracle handles products with finite factors") {
    Group prod = Group::direct_product(
        Group::free_group("a"),
        Group::finite_group({"e", "s"}, {{0, 1}, {1, 0}}, std::map<char, int>{{'s', 1}}));
    // neighbours along the free direction must differ
    std::vector<Pattern> eq;
    for (Symbol v = 0; v < 2; ++v)
        eq.push_back(Pattern::exact(prod, {w(""), w("a")}, {v, v}));
    auto cert = emptiness(Sft(prod, {"0", "1"}, eq), 4);
    REQUIRE(cert.verdict == EmptinessCertificate::Verdict::nonempty_periodic);
    auto cfg = config_from_witness(prod, {"0", "1"}, *cert.witness);
    CHECK(verify_configuration(Sft(prod, {"0", "1"}, eq), cfg, 4).ok);

    Sft dead(prod, {"0"}, {Pattern::exact(prod, {w("")}, {0})});
    CHECK(emptiness(dead, 4).verdict == EmptinessCertificate::Verdict::empty);
}

TEST_CASE("unknown is an honest verdict under a tiny budget") {
    Group g2 = Group::free_abelian(2);
    // checkerboard-only: no period-1 point, and radius-1 patches exist,
    // so a budget of 1 can conclude nothing
    std::vector<Pattern> eq;
    for (Symbol s = 0; s < 2; ++s) {
        eq.push_back(Pattern::exact(g2, {w(""), w("a")}, {s, s}));
        eq.push_back(Pattern::exact(g2, {w(""), w("b")}, {s, s}));
    }
    auto cert = emptiness(Sft(g2, {"0", "1"}, eq), 1);
    CHECK(cert.verdict == EmptinessCertificate::Verdict::unknown);
    CHECK(cert.radius == 1);
}

TEST_CASE("enumeration capacity limits raise capacity errors") {
    Group z = zline();
    Sft full = z_sft(z, 2, {});
    EnumLimits tiny;
    tiny.max_results = 4;
    CHECK_THROWS_AS(admissible_patches(full, 2, tiny), capacity_error);
    tiny.max_results = 1000;
    tiny.max_nodes = 3;
    CHECK_THROWS_AS(admissible_patch_count(full, 2, tiny), capacity_error);
}

TEST_CASE("finite-group emptiness") {
    std::vector<std::vector<int>> table{{0, 1}, {1, 0}};
    Group c2 = Group::finite_group({"e", "s"}, table, std::map<char, int>{{'s', 1}});
    Sft diff(c2, {"0", "1"}, {Pattern::exact(c2, {w(""), w("s")}, {0, 0}),
                              Pattern::exact(c2, {w(""), w("s")}, {1, 1})});
    auto cert = emptiness(diff);
    REQUIRE(cert.verdict == EmptinessCertificate::Verdict::nonempty_periodic);
    auto cfg = config_from_witness(c2, {"0", "1"}, *cert.witness);
    CHECK(cfg.value(w("")) != cfg.value(w("s")));

    Sft dead(c2, {"0"}, {Pattern::exact(c2, {w("")}, {0})});
    CHECK(emptiness(dead).verdict == EmptinessCertificate::Verdict::empty);
}

TEST_CASE("product patch counts multiply") {
    Group z = zline();
    Sft g = golden(z);
    Sft prod = product_sft(g, g);
    CHECK(admissible_patch_count(prod, 1) == 25);

    // identity case: X x full singleton
    Sft one(z, {"*"}, {});
    Sft px = product_sft(g, one);
    for (int n = 1; n <= 3; ++n)
        CHECK(admissible_patch_count(px, n) == admissible_patch_count(g, n));

    Sft dead = z_sft(z, 2, {"0", "1"});
    auto cert = emptiness(product_sft(g, dead));
    CHECK(cert.verdict == EmptinessCertificate::Verdict::empty);
}

TEST_CASE("disjoint union patch counts add") {
    Group z = zline();
    Sft g = golden(z);
    Sft uni = disjoint_union_sft(g, g);
    CHECK(admissible_patch_count(uni, 1) == 10);

    Sft dead = z_sft(z, 2, {"0", "1"});
    auto cert = emptiness(disjoint_union_sft(g, dead));
    CHECK(cert.verdict == emptiness(g).verdict);
    CHECK(emptiness(disjoint_union_sft(dead, dead)).verdict ==
          EmptinessCertificate::Verdict::empty);
}

TEST_CASE("intersection and stabilizers") {
    Group z = zline();
    Sft g = golden(z);
    Sft self = intersect_sft(g, g);
    for (int n = 1; n <= 3; ++n)
        CHECK(admissible_patch_count(self, n) == admissible_patch_count(g, n));

    Sft fix_a = stabilizer_sft(z, {"0", "1"}, w("a"));
    CHECK(admissible_patch_count(fix_a, 2) == 2);
    Sft fix_aa = stabilizer_sft(z, {"0", "1"}, w("aa"));
    CHECK(admissible_patch_count(fix_aa, 2) == 4);

    auto cert = emptiness(intersect_sft(g, fix_a));
    REQUIRE(cert.verdict == EmptinessCertificate::Verdict::nonempty_periodic);
    CHECK(std::get<QuotientWitness>(*cert.witness).symbols == std::vector<Symbol>{0});

    Sft no00 = z_sft(z, 2, {"00"});
    CHECK(emptiness(intersect_sft(intersect_sft(g, fix_a), no00)).verdict ==
          EmptinessCertificate::Verdict::empty);

    Sft nodiff = z_sft(z, 2, {"00", "11"});
    CHECK(emptiness(intersect_sft(nodiff, fix_a)).verdict ==
          EmptinessCertificate::Verdict::empty);

    CHECK_THROWS_AS(stabilizer_sft(z, {"0", "1"}, w("aA")), input_error);
}

TEST_CASE("verify_configuration examples") {
    Group z = zline();
    Sft g = golden(z);
    auto zeros = LazyConfiguration::constant(z, {"0", "1"}, 0);
    CHECK(verify_configuration(g, zeros, 50).ok);

    auto ones = LazyConfiguration::constant(z, {"0", "1"}, 1);
    auto res = verify_configuration(g, ones, 1);
    CHECK_FALSE(res.ok);
    CHECK(res.translate == w("")); // violation at the identity

    auto alt = LazyConfiguration::parity(z, {"0", "1"});
    CHECK(verify_configuration(g, alt, 100).ok);
}

TEST_CASE("periodic point search") {
    Group z = zline();
    auto p1 = periodic_point_search(golden(z), 6);
    REQUIRE(p1.has_value());
    CHECK(p1->value(w("")) == 0);
    CHECK(p1->description().find("\"modulus\":1") != std::string::npos);

    auto p2 = periodic_point_search(z_sft(z, 2, {"00", "11"}), 6);
    REQUIRE(p2.has_value());
    CHECK(p2->value(w("")) != p2->value(w("a")));

    CHECK_FALSE(periodic_point_search(z_sft(z, 2, {"0", "1"}), 6).has_value());

    Group f2 = Group::free_group("ab");
    CHECK_FALSE(periodic_point_search(f2_golden_pairs(f2), 4).has_value());
    Group prod = Group::direct_product(Group::free_group("a"), Group::free_group("b"));
    CHECK_THROWS_AS(periodic_point_search(Sft(prod, {"0"}, {}), 3), input_error);
}

TEST_CASE("alphabet helpers") {
    auto p = paired_alphabet({"0", "1"}, {"x"});
    CHECK(p == std::vector<std::string>{"(0,x)", "(1,x)"});
    auto tg = tagged_union_alphabet({"0"}, {"0", "1"});
    CHECK(tg == std::vector<std::string>{"l:0", "r:0", "r:1"});
    auto tu = tuple_alphabet({"0", "1"}, 2);
    CHECK(tu == std::vector<std::string>{"(0,0)", "(0,1)", "(1,0)", "(1,1)"});
}

TEST_CASE("lazy configurations are group-consistent and concurrency safe") {
    Group z2g = Group::free_abelian(2);
    auto cfg = LazyConfiguration::parity(z2g, {"0", "1"});
    CHECK(cfg.value(w("ab")) == cfg.value(w("ba")));
    CHECK(cfg.value(w("aA")) == 0);

    std::vector<std::thread> threads;
    std::vector<Symbol> results(8, -1);
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&cfg, &results, t]() {
            Symbol acc = 0;
            for (int i = 0; i < 50; ++i)
                acc ^= cfg.value(Word(std::string(static_cast<std::size_t>(i % 5), 'a')));
            results[static_cast<std::size_t>(t)] = acc;
        });
    for (auto& th : threads)
        th.join();
    for (Symbol r : results)
        CHECK(r == results[0]);
}

TEST_CASE("window oracle") {
    Group z = zline();
    // golden-mean minimal window set at n=1: alternating survives
    std::vector<std::vector<Symbol>> L = {
        oracle::linear_to_ball(z, 1, {0, 1, 0}),
        oracle::linear_to_ball(z, 1, {1, 0, 1}),
    };
    CHECK(window_set_nonempty(z, 2, 1, L));
    CHECK_FALSE(window_set_nonempty(z, 2, 1, {L[0]}));
    CHECK_FALSE(window_set_nonempty(z, 2, 1, {}));

    Group g2 = Group::free_abelian(2);
    CHECK_THROWS_AS(window_set_nonempty(g2, 2, 1, {}), oracle_error);
}

TEST_CASE("quotient indexing") {
    Group g2 = Group::free_abelian(2);
    CHECK(quotient_size(g2, 3) == 9);
    CHECK(quotient_index(g2, 3, w("ab")) == 4);  // (1,1)
    CHECK(quotient_index(g2, 3, w("A")) == 6);   // (2,0)
    Group prod = Group::direct_product(Group::free_group("a"),
                                       Group::finite_group({"e", "s"}, {{0, 1}, {1, 0}},
                                                           std::map<char, int>{{'s', 1}}));
    CHECK(quotient_size(prod, 2) == 4);
    CHECK(quotient_index(prod, 2, w("as")) == 3);
}
