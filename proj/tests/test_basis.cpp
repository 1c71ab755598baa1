#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "stanley/basis.hpp"
#include "stanley/characters.hpp"
#include "stanley/structure.hpp"

using namespace stanley;
using V = std::vector<value_t>;

namespace {

// Expansion values below b_n, from all subsets of b_0..b_{n-1}.
V oracle_expansion(const Basis& b, std::size_t n)
{
    V gens;
    for (std::size_t k = 0; k < n; ++k)
        gens.push_back(b.at(k));
    V out;
    for (value_t s : oracle::subset_sums(gens))
        if (s < b.at(n))
            out.push_back(s);
    return out;
}

ComposedSystem power_system(V set, unsigned ell) { return ComposedSystem::make(std::move(set), ell, Basis{{}, ell}); }

} // namespace

TEST(VerifyBasis, Examples)
{
    EXPECT_TRUE(verify_basis(Basis{{1}}).valid);
    EXPECT_TRUE(verify_basis(Basis{{}}).valid);
    EXPECT_TRUE(verify_basis(Basis{{2}}).valid);

    const auto bad = verify_basis(Basis{{3}});
    EXPECT_FALSE(bad.valid);
    ASSERT_TRUE(bad.index.has_value());
    EXPECT_EQ(*bad.index, 0u);

    // 10 is not divisible by 9, so the tripling tail 30, 90, ... never reaches 3^k
    const auto odd = verify_basis(Basis{{1, 7, 10}, 0, TailRule::tripling});
    EXPECT_FALSE(odd.valid);

    EXPECT_TRUE(verify_basis(Basis{{1, 3, 9}, 0, TailRule::tripling}).valid);
    EXPECT_TRUE(verify_basis(Basis{{1, 6}}).valid);
    EXPECT_FALSE(verify_basis(Basis{{1, 9}}).valid);
    EXPECT_EQ(*verify_basis(Basis{{1, 9}}).index, 1u);
    EXPECT_TRUE(verify_basis(Basis{{9, 54}, 2}).valid);
}

TEST(VerifyBasis, AgreesWithValuationOracle)
{
    for (value_t b0 = 1; b0 <= 30; ++b0) {
        for (value_t b1 = 1; b1 <= 30; ++b1) {
            const bool expected = oracle::v3(b0) == 0 && oracle::v3(b1) == 1;
            EXPECT_EQ(verify_basis(Basis{{b0, b1}}).valid, expected) << b0 << "," << b1;
        }
    }
}

TEST(BasisTail, GeometricFromAndBlockStart)
{
    const Basis s0{{1}};
    EXPECT_EQ(s0.geometric_from(), 0u);
    EXPECT_EQ(block_start(s0), 0u);
    const Basis two{{2}};
    EXPECT_EQ(two.geometric_from(), 1u);
    EXPECT_EQ(block_start(two), 1u); // 3 > 2
    const Basis odd{{1, 7, 10}, 0, TailRule::tripling};
    EXPECT_EQ(odd.at(3), 30u);
    EXPECT_EQ(odd.at(5), 270u);
    EXPECT_EQ(odd.geometric_from(), 2u);
    EXPECT_EQ(block_start(odd), 2u); // 10 > 1 + 7
}

TEST(ExpandBasis, Examples)
{
    EXPECT_EQ(expand_basis(Basis{{1}}, Bound::terms(8)), (V{0, 1, 3, 4, 9, 10, 12, 13}));
    EXPECT_EQ(expand_basis(Basis{{2}}, Bound::terms(8)), (V{0, 2, 3, 5, 9, 11, 12, 14}));
    EXPECT_EQ(expand_basis(Basis{{1, 7, 10}, 0, TailRule::tripling}, Bound::terms(9)),
              (V{0, 1, 7, 8, 10, 11, 17, 18, 30}));
    EXPECT_EQ(expand_basis(Basis{{2}}, Bound::up_to(11)), (V{0, 2, 3, 5, 9, 11}));
    EXPECT_THROW(expand_basis(Basis{{0, 3}}, Bound::terms(4)), invalid_input);
    EXPECT_THROW(expand_basis(Basis{{1, 1}}, Bound::terms(4)), verification_error);
}

TEST(ExpandBasis, AgreesWithSubsetEnumeration)
{
    std::mt19937_64 rng(17);
    for (int t = 0; t < 200; ++t) {
        Basis b;
        const std::size_t len = 1 + rng() % 4;
        for (std::size_t k = 0; k < len; ++k) {
            value_t p = 1;
            for (std::size_t e = 0; e < k; ++e)
                p *= 3;
            value_t m;
            do
                m = 1 + rng() % 20;
            while (m % 3 == 0);
            b.head.push_back(m * p);
        }
        ASSERT_TRUE(verify_basis(b).valid);
        const auto want = oracle_expansion(b, 12);
        EXPECT_EQ(expand_basis(b, Bound::terms(want.size())), want);
    }
}

TEST(SubsetSums, MatchesMaskEnumeration)
{
    const V gens{2, 3, 9, 27, 81};
    EXPECT_EQ(subset_sums(gens), oracle::subset_sums(gens));
    EXPECT_EQ(subset_sums(V{}), (V{0}));
    EXPECT_THROW(subset_sums(V{1, 2, 3}), verification_error);
}

TEST(GeneratingSeed, Examples)
{
    EXPECT_EQ(generating_seed(Basis{{1}}), (V{0}));
    EXPECT_EQ(generating_seed(Basis{{2}}), (V{0, 2}));
    EXPECT_EQ(generating_seed(Basis{{1, 7, 10}, 0, TailRule::tripling}), (V{0, 1, 7, 8}));
}

namespace {

void check_basic_sequence(const Basis& b)
{
    const auto seed = generating_seed(b);
    const auto expansion = expand_basis(b, Bound::terms(500));
    const auto greedy = generate(seed, Bound::terms(500)).terms;
    ASSERT_EQ(greedy, expansion) << "head size " << b.head.size() << " b0 " << b.head.front();
}

// every valid head b_0..b_{len-1} with entries <= max_entry
void valid_heads(std::size_t len, value_t max_entry, V& cur, std::vector<V>& out)
{
    if (cur.size() == len) {
        out.push_back(cur);
        return;
    }
    value_t p = 1;
    for (std::size_t e = 0; e < cur.size(); ++e)
        p *= 3;
    for (value_t v = p; v <= max_entry; v += p) {
        if (oracle::v3(v) != cur.size())
            continue;
        cur.push_back(v);
        valid_heads(len, max_entry, cur, out);
        cur.pop_back();
    }
}

} // namespace

class BasicSequences : public ::testing::TestWithParam<std::size_t> {};

TEST_P(BasicSequences, EveryValidHeadIsGreedy)
{
    std::vector<V> heads;
    V cur;
    valid_heads(GetParam(), 100, cur, heads);
    ASSERT_FALSE(heads.empty());
    for (const auto& h : heads)
        check_basic_sequence(Basis{h});
}

INSTANTIATE_TEST_SUITE_P(HeadLength, BasicSequences, ::testing::Values(1, 2, 3, 4));

TEST(Compose, Examples)
{
    EXPECT_EQ(compose(power_system({0, 2, 5, 6}, 2), Bound::terms(12)),
              (V{0, 2, 5, 6, 9, 11, 14, 15, 27, 29, 32, 33}));
    EXPECT_EQ(compose(power_system({0, 2}, 1), Bound::terms(8)), (V{0, 2, 3, 5, 9, 11, 12, 14}));
    EXPECT_EQ(compose(power_system({0, 4, 10, 12}, 2), Bound::terms(9)), (V{0, 4, 9, 10, 12, 13, 19, 21, 27}));
}

TEST(Compose, AgreesWithSubsetEnumeration)
{
    for (unsigned i = 1; i <= 2; ++i) {
        for (Family f : {Family::A, Family::B}) {
            const auto sys = plan_system(FamilyRecipe{i, f, 1});
            V gens;
            for (std::size_t k = 0; k < 8; ++k)
                gens.push_back(sys.basis().at(k));
            const value_t cap = sys.basis().at(8);
            V want;
            for (value_t a : sys.set())
                for (value_t s : oracle::subset_sums(gens))
                    if (a + s < cap)
                        want.push_back(a + s);
            std::sort(want.begin(), want.end());
            EXPECT_EQ(compose(sys, Bound::up_to(cap - 1)), want);
        }
    }
}

TEST(Modularize, Examples)
{
    const auto s1 = power_system({0, 2, 5, 6}, 2);
    EXPECT_EQ(s1.n0(), 1u);
    const auto l1 = modularize(s1);
    EXPECT_EQ(l1.elements, (V{0, 2, 5, 6, 9, 11, 14, 15}));
    EXPECT_EQ(l1.modulus, 27u);
    EXPECT_TRUE(oracle::modular(l1.elements, l1.modulus));

    const auto s2 = power_system({0, 2}, 1);
    EXPECT_EQ(s2.n0(), 1u);
    const auto l2 = modularize(s2);
    EXPECT_EQ(l2.elements, (V{0, 2, 3, 5}));
    EXPECT_EQ(l2.modulus, 9u);
}

TEST(ComposedSystem, InvariantViolations)
{
    EXPECT_THROW(power_system({0}, 0), invalid_input);
    EXPECT_THROW(power_system({0, 2, 5}, 2), invalid_input);      // cardinality
    EXPECT_THROW(power_system({0, 1, 2, 4}, 2), invalid_input);   // AP mod 9
    EXPECT_THROW(ComposedSystem::make({0, 2, 5, 6}, 2, Basis{{}, 1}), invalid_input); // shift
    EXPECT_THROW(ComposedSystem::make({0, 2, 5, 6}, 2, Basis{{9}, 2, TailRule::tripling}), invalid_input);
    EXPECT_THROW(ComposedSystem::make({0, 2, 5, 6}, 2, Basis{{18, 9}, 2}), invalid_input); // valuation
    EXPECT_NO_THROW(ComposedSystem::make({0, 2, 5, 6}, 2, Basis{{18}, 2}));
}

TEST(Decompose, Examples)
{
    const auto sys = power_system({0, 2, 5, 6}, 2);
    EXPECT_EQ(decompose(29, sys), (Decomposition{2, {0, 1}})); // 29 = 2 + b_1
    EXPECT_EQ(decompose(0, sys), (Decomposition{0, {}}));
    EXPECT_EQ(decompose(15, sys), (Decomposition{6, {1}})); // 15 = 6 + b_0
    EXPECT_THROW(decompose(1, sys), invalid_input);
    EXPECT_THROW(decompose(16, sys), invalid_input);
}

TEST(Decompose, RoundTripAndUniqueness)
{
    std::vector<ComposedSystem> systems{power_system({0, 2, 5, 6}, 2), power_system({0, 2}, 1),
                                        power_system({0, 4, 10, 12}, 2)};
    for (unsigned i = 1; i <= 3; ++i)
        for (Family f : {Family::A, Family::B})
            systems.push_back(plan_system(FamilyRecipe{i, f, 2}));
    for (const auto& sys : systems) {
        const auto values = compose(sys, Bound::terms(1000));
        ASSERT_EQ(values.size(), 1000u);
        ASSERT_EQ(std::adjacent_find(values.begin(), values.end()), values.end());
        std::set<std::pair<value_t, std::vector<std::uint8_t>>> reps;
        for (value_t v : values) {
            const auto d = decompose(v, sys);
            ASSERT_EQ(recompose(d, sys), v);
            ASSERT_TRUE(std::find(sys.set().begin(), sys.set().end(), d.a) != sys.set().end());
            ASSERT_TRUE(d.delta.empty() || d.delta.back() == 1);
            reps.insert({d.a, d.delta});
        }
        EXPECT_EQ(reps.size(), values.size());
    }
}

TEST(Composition, FamilySystemsAreIndependentGreedySequences)
{
    for (unsigned i = 1; i <= 3; ++i) {
        for (Family f : {Family::A, Family::B}) {
            for (std::uint64_t j = 0; j <= 2; ++j) {
                const auto sys = plan_system(FamilyRecipe{i, f, j});
                const auto l = modularize(sys);
                ASSERT_TRUE(verify_modular(l.elements, l.modulus).ok());
                const unsigned depth = std::max(7u, arith::floor_log2(l.elements.size()) + 1);
                const std::uint64_t count = std::max<std::uint64_t>(500, std::uint64_t{1} << (depth + 1));
                const auto composed = compose(sys, Bound::terms(count));
                const auto greedy = generate(l.elements, Bound::terms(count)).terms;
                ASSERT_EQ(composed, greedy) << to_string(f) << i << " j=" << j;
                const auto rep = analyze_independence(composed, depth);
                ASSERT_TRUE(rep.independent()) << to_string(f) << i << " j=" << j;
                EXPECT_EQ(rep.certificate->character,
                          static_cast<std::int64_t>(family_character(FamilyRecipe{i, f, j})));
            }
        }
    }
}

TEST(MinimalGeneratingPrefix, Examples)
{
    const auto odd = generate(V{0, 1, 7}, Bound::terms(300)).terms;
    EXPECT_EQ(minimal_generating_prefix(odd, 300), 3u);
    const auto s0 = generate(V{0}, Bound::terms(300)).terms;
    EXPECT_EQ(minimal_generating_prefix(s0, 300), 1u);
    EXPECT_THROW(minimal_generating_prefix(V{0, 1, 2}, 3), verification_error);
    EXPECT_THROW(minimal_generating_prefix(s0, 0), invalid_input);
}
