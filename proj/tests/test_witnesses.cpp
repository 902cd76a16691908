#include <gtest/gtest.h>

#include "uta/uta.hpp"

using namespace uta;

namespace {

Tree t(const LangPredicate& p, const char* text) { return parse_tree(text, p.alphabet); }

TEST(ModularFamily, SizeAndMemberships) {
    const auto w = gen_lemma34({2, 3});
    EXPECT_EQ(size(w.automaton), (SizePair{2, 12}));
    EXPECT_EQ(w.automaton.kind, Kind::DtaDfa);
    validate(w.automaton);
    EXPECT_TRUE(w.predicate(t(w.predicate, "a(b,b,1)")));
    EXPECT_FALSE(w.predicate(t(w.predicate, "a(b,1)")));
    EXPECT_TRUE(w.predicate(t(w.predicate, "a(1)")));
    EXPECT_TRUE(w.predicate(t(w.predicate, "a(a(b,b,b,1,0))")));
    EXPECT_FALSE(w.predicate(t(w.predicate, "a(b,b,b,1,0)")));
    EXPECT_FALSE(w.predicate(t(w.predicate, "a(a(a(1)))")));
}

TEST(ModularFamily, SizeFormula) {
    for (const auto& k : std::vector<std::vector<std::size_t>>{{2}, {2, 3}, {2, 3, 5}, {3, 4, 5, 7}}) {
        std::size_t h = 0;
        for (std::size_t i = 1; i <= k.size(); ++i) h += k[i - 1] + floor_log2(i) + 3;
        const auto a = gen_lemma34(k).automaton;
        EXPECT_EQ(size(a), (SizePair{k.size(), h}));
        for (const auto& [key, n] : a.horizontal) EXPECT_TRUE(as_dfa(n).is_complete());
    }
}

TEST(ModularFamily, RejectsBadModuli) {
    try {
        gen_lemma34({2, 4});
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("2 and 4"), std::string::npos) << e.what();
    }
    EXPECT_THROW(gen_lemma34({3, 2}), Error);
    EXPECT_THROW(gen_lemma34({}), Error);
    EXPECT_THROW(gen_lemma34({1, 3}), Error);
}

TEST(ModularFamily, AutomatonAgreesWithPredicate) {
    for (const auto& k : std::vector<std::vector<std::size_t>>{{2, 3}, {2, 3, 5}}) {
        const auto w = gen_lemma34(k);
        for (const auto& tr : enumerate_trees(w.predicate.alphabet, {3, 4, 200000}).trees)
            ASSERT_EQ(accepts(w.automaton, tr), w.predicate(tr)) << render_tree(tr);
        for (const auto& tr : lemma34_grid(k.size(), 12)) ASSERT_EQ(accepts(w.automaton, tr), w.predicate(tr)) << render_tree(tr);
    }
}

TEST(PrimeFamily, SizeAndMemberships) {
    const auto w = gen_thm41(2);
    EXPECT_EQ(size(w.automaton), (SizePair{2, 9}));
    EXPECT_EQ(w.automaton.kind, Kind::NtaDfa);
    validate(w.automaton);
    EXPECT_TRUE(w.predicate(t(w.predicate, "a(b,b)")));
    EXPECT_FALSE(w.predicate(t(w.predicate, "a(b)")));
    EXPECT_TRUE(w.predicate(t(w.predicate, "a(a(b,b,b))")));
    EXPECT_TRUE(accepts(w.automaton, t(w.predicate, "a(b,b)")));
    EXPECT_FALSE(accepts(w.automaton, t(w.predicate, "a(b)")));
    EXPECT_TRUE(accepts(w.automaton, t(w.predicate, "a(a(b,b,b))")));
    EXPECT_EQ(size(gen_thm41(3).automaton), (SizePair{3, 2 + 3 + 5 + 6}));
}

TEST(PrimeFamily, DegenerateAndInvalid) {
    const auto w = gen_thm41(1);
    EXPECT_TRUE(w.predicate(t(w.predicate, "a(b,b)")));
    EXPECT_FALSE(w.predicate(t(w.predicate, "a(b)")));
    EXPECT_TRUE(accepts(w.automaton, t(w.predicate, "a(a(a(b,b)))")));
    EXPECT_THROW(gen_thm41(0), Error);
}

TEST(PrimeFamily, AutomatonAgreesWithPredicate) {
    for (std::size_t n = 1; n <= 3; ++n) {
        const auto w = gen_thm41(n);
        std::size_t product = 1;
        for (auto p : first_primes(n)) product *= p;
        for (const auto& tr : thm41_grid(3 * n, 3 * product)) ASSERT_EQ(accepts(w.automaton, tr), w.predicate(tr)) << render_tree(tr);
        for (const auto& tr : enumerate_trees(w.predicate.alphabet, {4, 4, 200000}).trees)
            ASSERT_EQ(accepts(w.automaton, tr), w.predicate(tr)) << render_tree(tr);
    }
}

TEST(PrimeFamily, PredicateMatchesFormula) {
    // direct transcription of the set definition for n = 2, primes 2, 3
    for (std::size_t i = 1; i <= 6; ++i)
        for (std::size_t k = 0; k <= 18; ++k) {
            const bool expected = (k % 2 == 0 && i % 2 == 1) || (k % 3 == 0 && i % 2 == 0);
            EXPECT_EQ(thm41_member(2, {2, 3}, i, k), expected) << i << "," << k;
        }
}

TEST(CertifyVertical, ModularFamily) {
    const auto pred = lemma34_predicate({2, 3});
    EXPECT_EQ(certify_vertical_bound(pred, lemma34_vertical_fooling_set({2, 3})), 2u);
    EXPECT_EQ(certify_vertical_bound(lemma34_predicate({2, 3, 5}), lemma34_vertical_fooling_set({2, 3, 5})), 3u);
}

TEST(CertifyVertical, SearchFindsMissingSeparators) {
    const auto pred = lemma34_predicate({2, 3});
    auto fs = lemma34_vertical_fooling_set({2, 3});
    fs.separators.clear();
    EXPECT_EQ(certify_vertical_bound(pred, fs), 2u);
}

TEST(CertifyVertical, TrivialAndFailing) {
    const auto pred = lemma34_predicate({2, 3});
    FoolingSetVertical one{{t(pred, "a(b)")}, {}};
    EXPECT_EQ(certify_vertical_bound(pred, one), 0u);
    // a(b) and a(b,b,b): both rejected under every context of the form a^j(x)
    FoolingSetVertical bad{{t(pred, "a(b)"), t(pred, "a(b,b,b)")}, {{{0, 1}, parse_context("a(x)", pred.alphabet)}}};
    EXPECT_THROW(certify_vertical_bound(pred, bad), SeparationFailure);
    // same pair without a separator: the search cannot help either
    bad.separators.clear();
    try {
        certify_vertical_bound(pred, bad);
        FAIL();
    } catch (const SeparationFailure& e) {
        EXPECT_EQ(e.pair, (IndexPair{0, 1}));
    }
}

TEST(CertifyHorizontal, ModularFamily) {
    const auto pred = lemma34_predicate({2, 3});
    const auto fs = lemma34_horizontal_fooling_set({2, 3});
    EXPECT_EQ(fs.tuples.size(), 6u);
    EXPECT_EQ(certify_horizontal_bound(pred, fs), 5u);
    EXPECT_EQ(certify_horizontal_bound(lemma34_predicate({2, 3, 5}), lemma34_horizontal_fooling_set({2, 3, 5})), 29u);
}

TEST(CertifyHorizontal, TrivialAndFailing) {
    const auto pred = lemma34_predicate({2, 3});
    FoolingSetHorizontal one{"a", {{Tree("b")}}, {}};
    EXPECT_EQ(certify_horizontal_bound(pred, one), 0u);
    // b^1 and b^7 are equivalent prefixes (7 ≡ 1 mod 6)
    FoolingSetHorizontal dup{"a", {std::vector<Tree>(1, Tree("b")), std::vector<Tree>(7, Tree("b"))}, {}};
    SeparatorSearch small;
    small.contexts.max_count = 30;
    small.max_padding = 2;
    try {
        certify_horizontal_bound(pred, dup, small);
        FAIL();
    } catch (const SeparationFailure& e) {
        EXPECT_EQ(e.pair, (IndexPair{0, 1}));
        EXPECT_NE(std::string(e.what()).find("tuples 0 and 1"), std::string::npos);
    }
}

TEST(Certify, BoundsNeverExceedConstructedSizes) {
    const std::vector<std::size_t> k{2, 3};
    const auto w = gen_lemma34(k);
    const auto s = canonical_sdta(dtadfa_to_sdta(w.automaton).automaton);
    const auto v = certify_vertical_bound(w.predicate, lemma34_vertical_fooling_set(k));
    const auto h = certify_horizontal_bound(w.predicate, lemma34_horizontal_fooling_set(k));
    EXPECT_LE(v, size(s).vertical);
    EXPECT_LE(h, s.moore.at(s.symbol("a")).dfa.size());
}

TEST(MarkedUnionWitness, ResidueParts) {
    const auto parts = residue_parts(3);
    const auto mu = minimize_moore(marked_union(parts));
    EXPECT_EQ(mu.dfa.size(), 3u);
    EXPECT_EQ(minimize_dfa(underlying_dfa(mu)).size(), 1u);
}

}  // namespace
