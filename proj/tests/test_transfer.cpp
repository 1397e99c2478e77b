#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "sft/transfer.hpp"

using namespace sft;

namespace {

Word w(const char* s) { return Word(std::string(s)); }

Group z2() { return Group::free_abelian(2); }
Group zt() { return Group::free_group("t"); } // Z with generator t

// projection Z^2 -> Z<t>, a -> t, b -> 0
Homomorphism projection() { return Homomorphism(z2(), zt(), {{'a', w("t")}, {'b', w("")}}); }

Sft golden_t() {
    Group z = zt();
    return Sft(z, {"0", "1"}, {Pattern::exact(z, {w(""), w("t")}, {1, 1})});
}

Sft empty_t() {
    Group z = zt();
    return Sft(z, {"0", "1"},
               {Pattern::exact(z, {w("")}, {0}), Pattern::exact(z, {w("")}, {1})});
}

// x(m,n) = m mod 2 on Z^2
LazyConfiguration first_coord_parity() {
    Group g = z2();
    return LazyConfiguration(
        g, {"0", "1"},
        [g](const Word& nf) {
            long long m = g.abelianized_exponents(nf)[0];
            return static_cast<Symbol>(((m % 2) + 2) % 2);
        },
        "{\"config\":\"test_first_coord_parity\"}");
}

FiniteIndexData z_over_2z() {
    return FiniteIndexData(Group::free_group("a"), Group::free_group("h"), {w("aa")},
                           {w(""), w("a")});
}

} // namespace

TEST_CASE("pullback_config") {
    auto rho = projection();
    auto alt = LazyConfiguration::parity(zt(), {"0", "1"});
    auto pulled = pullback_config(rho, alt);
    for (const Word& g : z2().ball(3)) {
        long long m = z2().abelianized_exponents(g)[0];
        CHECK(pulled.value(g) == static_cast<Symbol>(((m % 2) + 2) % 2));
    }

    Group f2 = Group::free_group("ab");
    auto idhom = Homomorphism::identity(f2);
    auto cfg = LazyConfiguration::parity(f2, {"0", "1"});
    auto same = pullback_config(idhom, cfg);
    for (const Word& g : f2.ball(5))
        CHECK(same.value(g) == cfg.value(g));

    auto c0 = LazyConfiguration::constant(zt(), {"0", "1"}, 0);
    auto pc = pullback_config(rho, c0);
    for (const Word& g : z2().ball(3))
        CHECK(pc.value(g) == 0);
}

TEST_CASE("section_config inverts pullback") {
    auto rho = projection();
    SectionData sd(rho, {{'t', w("a")}});
    auto alt = LazyConfiguration::parity(zt(), {"0", "1"});
    auto roundtrip = section_config(sd, pullback_config(rho, alt));
    for (const Word& g : zt().ball(5))
        CHECK(roundtrip.value(g) == alt.value(g));

    auto c1 = LazyConfiguration::constant(z2(), {"0", "1"}, 1);
    auto sc = section_config(sd, c1);
    for (const Word& g : zt().ball(4))
        CHECK(sc.value(g) == 1);
}

TEST_CASE("section_config through the abelianization of F2") {
    Group f2 = Group::free_group("ab");
    Homomorphism abel(f2, z2(), {{'a', w("a")}, {'b', w("b")}});
    SectionData sd(abel, {{'a', w("a")}, {'b', w("b")}});
    auto base = first_coord_parity();
    auto lifted = pullback_config(abel, base);
    auto back = section_config(sd, lifted);
    for (const Word& g : z2().ball(3))
        CHECK(back.value(g) == base.value(g));
}

TEST_CASE("section validation") {
    auto rho = projection();
    CHECK_THROWS_AS(SectionData(rho, {{'t', w("aa")}}), input_error);
    CHECK_THROWS_AS(SectionData(rho, std::map<char, Word>{}), input_error);
    // provenance check rejects a configuration with a visible violation
    SectionData sd(rho, {{'t', w("a")}});
    KernelData kd(rho, {w("b")});
    Sft pull = pullback_sft(kd, golden_t());
    auto ones = LazyConfiguration::constant(z2(), {"0", "1"}, 1);
    CHECK_THROWS_AS(section_config(sd, ones, &pull), contract_error);
}

TEST_CASE("pullback_sft of the golden mean") {
    KernelData kd(projection(), {w("b")});
    Sft pull = pullback_sft(kd, golden_t());
    CHECK(pull.group() == z2());
    CHECK(admissible_patch_count(pull, 2) == 13);
    CHECK(static_cast<long long>(admissible_patch_count(pull, 2)) ==
          oracle::grid_count(pull, oracle::diamond(2)));
    // on the 3x3 square only the centred translate of the plus-shaped window
    // fits: middle row golden (5), centre column tied, corners free (2^4)
    CHECK(oracle::grid_count(pull, oracle::square(1)) == 80);

    Sft pull_full = pullback_sft(kd, Sft(zt(), {"0", "1"}, {}));
    CHECK(admissible_patch_count(pull_full, 2) == 32); // one free column per x in [-2,2]
    CHECK(static_cast<long long>(admissible_patch_count(pull_full, 2)) ==
          oracle::grid_count(pull_full, oracle::diamond(2)));
    CHECK(oracle::grid_count(pull_full, oracle::square(1)) == 8); // 2^3 columns

    auto cert = emptiness(pullback_sft(kd, empty_t()));
    CHECK(cert.verdict == EmptinessCertificate::Verdict::empty);
}

TEST_CASE("pullback emptiness agrees with the source") {
    KernelData kd(projection(), {w("b")});
    auto src = emptiness(golden_t());
    auto pb = emptiness(pullback_sft(kd, golden_t()));
    REQUIRE(src.verdict == EmptinessCertificate::Verdict::nonempty_periodic);
    CHECK(pb.verdict == EmptinessCertificate::Verdict::nonempty_periodic);

    // random instances: whenever the semi-oracle upstairs reaches a verdict,
    // it matches the exact verdict downstairs
    std::mt19937 rng(83);
    for (int t = 0; t < 12; ++t) {
        auto inst = oracle::random_z_sft(rng, zt(), 2, 2, 2);
        auto down = emptiness(inst.sft);
        auto up = emptiness(pullback_sft(kd, inst.sft), 4);
        if (up.verdict != EmptinessCertificate::Verdict::unknown)
            CHECK(up.verdict == down.verdict);
    }
}

TEST_CASE("local rules lift through the projection") {
    Group z = zt();
    // XOR of the two right neighbours' bits: out = x(g) ^ x(g t)
    LocalRule xr(z, {w(""), w("t")}, {"0", "1"}, {"0", "1"}, {0, 1, 1, 0});
    KernelData kd(projection(), {w("b")});
    LocalRule lifted = lift_local_rule(kd, xr);
    REQUIRE(lifted.support.size() == 2);
    CHECK(lifted.support[0] == w(""));
    CHECK(lifted.support[1] == w("a"));

    auto img = apply_local_rule(lifted, first_coord_parity());
    for (const Word& g : z2().ball(3))
        CHECK(img.value(g) == 1); // m and m+1 always differ

    LocalRule id = LocalRule::identity_rule(z, {"0", "1"});
    auto alt = LazyConfiguration::parity(z, {"0", "1"});
    auto same = apply_local_rule(id, alt);
    for (const Word& g : z.ball(3))
        CHECK(same.value(g) == alt.value(g));

    LocalRule c1(z, {w("")}, {"0", "1"}, {"0", "1"}, {1, 1});
    auto ones = apply_local_rule(c1, alt);
    for (const Word& g : z.ball(3))
        CHECK(ones.value(g) == 1);
}

TEST_CASE("free extension along the first coordinate") {
    Homomorphism embed(zt(), z2(), {{'t', w("a")}});
    Sft rows = free_extension_sft(embed, golden_t());
    CHECK(rows.group() == z2());
    // rows independent: diamond rows of lengths 1,3,5,3,1 give 2*5*13*5*2
    CHECK(admissible_patch_count(rows, 2) == 1300);
    CHECK(static_cast<long long>(admissible_patch_count(rows, 2)) ==
          oracle::grid_count(rows, oracle::diamond(2)));
    CHECK(oracle::grid_count(rows, oracle::square(1)) == 125); // 5^3

    Sft full = free_extension_sft(embed, Sft(zt(), {"0", "1"}, {}));
    CHECK(full.forbidden().empty());

    auto cert = emptiness(free_extension_sft(embed, empty_t()));
    CHECK(cert.verdict == EmptinessCertificate::Verdict::empty);
}

TEST_CASE("restrict_config") {
    Homomorphism embed(zt(), z2(), {{'t', w("a")}});
    auto base = first_coord_parity();
    auto restricted = restrict_config(embed, base);
    auto alt = LazyConfiguration::parity(zt(), {"0", "1"});
    for (const Word& g : zt().ball(5))
        CHECK(restricted.value(g) == alt.value(g));

    auto c0 = LazyConfiguration::constant(z2(), {"0", "1"}, 0);
    auto rc = restrict_config(embed, c0);
    for (const Word& g : zt().ball(4))
        CHECK(rc.value(g) == 0);
}

TEST_CASE("lift through a finite-index subgroup") {
    FiniteIndexData fid = z_over_2z();
    Group z = fid.ambient();
    Group h = fid.subgroup();
    auto alt = LazyConfiguration::parity(h, {"0", "1"});
    auto lifted = lift_config_finite_index(fid, alt);
    // x~(n) = c(floor(n/2)): positions -3..3 read 0,1,1,0,0,1,1
    std::vector<std::pair<std::string, Symbol>> expect{
        {"AAA", 0}, {"AA", 1}, {"A", 1}, {"", 0}, {"a", 0}, {"aa", 1}, {"aaa", 1}};
    for (auto& [word, sym] : expect)
        CHECK(lifted.value(Word(word)) == sym);

    auto c1 = LazyConfiguration::constant(h, {"0", "1"}, 1);
    auto l1 = lift_config_finite_index(fid, c1);
    for (const Word& g : z.ball(4))
        CHECK(l1.value(g) == 1);

    // restriction of the lift recovers the original
    Homomorphism embed(h, z, {{'h', w("aa")}});
    auto back = restrict_config(embed, lifted);
    for (const Word& g : h.ball(4))
        CHECK(back.value(g) == alt.value(g));
}

TEST_CASE("higher block encode/decode") {
    FiniteIndexData fid = z_over_2z();
    Group z = fid.ambient();
    Group h = fid.subgroup();

    auto alt = LazyConfiguration::parity(z, {"0", "1"});
    auto enc = higher_block_encode(fid, alt);
    // constant tuple (0,1): index 0*2+1 = 1
    for (const Word& g : h.ball(4))
        CHECK(enc.value(g) == 1);
    CHECK(enc.symbol_name(enc.value(w(""))) == "(0,1)");

    auto dec = higher_block_decode(fid, enc, {"0", "1"});
    for (const Word& g : z.ball(6))
        CHECK(dec.value(g) == alt.value(g));

    auto c0 = LazyConfiguration::constant(z, {"0", "1"}, 0);
    auto enc0 = higher_block_encode(fid, c0);
    for (const Word& g : h.ball(3))
        CHECK(enc0.value(g) == 0); // tuple (0,0)

    // encode(decode(e)) = e for encodings
    auto enc2 = higher_block_encode(fid, dec);
    for (const Word& g : h.ball(4))
        CHECK(enc2.value(g) == enc.value(g));
}

TEST_CASE("higher block round trips on random admissible configurations") {
    FiniteIndexData fid = z_over_2z();
    Group z = fid.ambient();
    std::mt19937 rng(41);
    int done = 0;
    while (done < 25) {
        auto inst = oracle::random_z_sft(rng, z);
        auto cert = emptiness(inst.sft);
        if (cert.verdict != EmptinessCertificate::Verdict::nonempty_periodic)
            continue;
        ++done;
        auto cfg = config_from_witness(z, inst.sft.alphabet(), *cert.witness);
        auto enc = higher_block_encode(fid, cfg);
        auto dec = higher_block_decode(fid, enc, inst.sft.alphabet());
        for (const Word& g : z.ball(6))
            CHECK(dec.value(g) == cfg.value(g));
    }
}

TEST_CASE("higher block decode reports overlap inconsistencies") {
    // redundant transversal: identity and aa sit in the same coset of 2Z
    FiniteIndexData redundant(Group::free_group("a"), Group::free_group("h"), {w("aa")},
                              {w(""), w("a"), w("aa")});
    Group h = redundant.subgroup();
    // constant tuple (0,1,1): slots 0 and 2 both describe even cells but disagree
    auto bad = LazyConfiguration::constant(h, tuple_alphabet({"0", "1"}, 3), 3);
    auto dec = higher_block_decode(redundant, bad, {"0", "1"});
    CHECK_THROWS_AS(dec.value(w("aa")), decode_error);

    // a consistent tuple decodes fine even with the redundant transversal
    auto good = LazyConfiguration::constant(h, tuple_alphabet({"0", "1"}, 3), 2); // (0,1,0)
    auto dec2 = higher_block_decode(redundant, good, {"0", "1"});
    CHECK(dec2.value(w("")) == 0);
    CHECK(dec2.value(w("a")) == 1);
    CHECK(dec2.value(w("aa")) == 0);
}

TEST_CASE("admissibility transports through the transfer maps") {
    // pullback: parity passes golden on Z, its pullback passes the pulled-back SFT
    KernelData kd(projection(), {w("b")});
    Sft pull = pullback_sft(kd, golden_t());
    auto alt = LazyConfiguration::parity(zt(), {"0", "1"});
    REQUIRE(verify_configuration(golden_t(), alt, 8).ok);
    CHECK(verify_configuration(pull, pullback_config(kd.hom(), alt), 4).ok);

    // free extension: the pulled-back configuration also lies in the row extension
    Homomorphism embed(zt(), z2(), {{'t', w("a")}});
    Sft rows = free_extension_sft(embed, golden_t());
    CHECK(verify_configuration(rows, pullback_config(kd.hom(), alt), 4).ok);

    // finite-index lift of an admissible configuration stays admissible for
    // the free extension of the subshift along the embedding h -> aa
    FiniteIndexData fid = z_over_2z();
    Group hsub = fid.subgroup();
    Sft golden_h(hsub, {"0", "1"}, {Pattern::exact(hsub, {w(""), w("h")}, {1, 1})});
    Homomorphism embed2(hsub, fid.ambient(), {{'h', w("aa")}});
    Sft ext = free_extension_sft(embed2, golden_h);
    auto alt_h = LazyConfiguration::parity(hsub, {"0", "1"});
    REQUIRE(verify_configuration(golden_h, alt_h, 8).ok);
    CHECK(verify_configuration(ext, lift_config_finite_index(fid, alt_h), 6).ok);
}

TEST_CASE("lift_elements picks shortest-then-lexicographic preimages") {
    auto rho = projection();
    auto lifts = lift_elements(rho, {w(""), w("t"), w("T"), w("tt")});
    CHECK(lifts[0] == w(""));
    CHECK(lifts[1] == w("a"));
    CHECK(lifts[2] == w("A"));
    CHECK(lifts[3] == w("aa"));
    CHECK_THROWS_AS(lift_elements(rho, {w("ttttt")}, 2), capacity_error);
}
