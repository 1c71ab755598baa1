#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "stanley/core.hpp"
#include "stanley/modsets.hpp"

using namespace stanley;
using V = std::vector<value_t>;

TEST(VerifyModular, Examples)
{
    EXPECT_EQ(verify_modular(V{0}, 1).verdict, Verdict::modular);
    ASSERT_TRUE(oracle::modular({0, 1}, 3));
    EXPECT_EQ(verify_modular(V{0, 1}, 3).verdict, Verdict::modular);

    const auto b10 = verify_modular(V{0, 4, 10, 12}, 9);
    EXPECT_EQ(b10.verdict, Verdict::invalid);
    ASSERT_TRUE(b10.violation.has_value());
    ASSERT_TRUE(std::holds_alternative<OutOfRange>(*b10.violation));
    EXPECT_EQ(std::get<OutOfRange>(*b10.violation).element, 10u);
    EXPECT_EQ(verify_near_modular(V{0, 4, 10, 12}, 9).verdict, Verdict::near_modular);
}

TEST(VerifyNearModular, Examples)
{
    ASSERT_TRUE(oracle::modular({0, 2, 5, 6}, 9));
    EXPECT_EQ(verify_near_modular(V{0, 2, 5, 6}, 9).verdict, Verdict::modular);

    const auto ap = verify_near_modular(V{0, 1, 2}, 9);
    EXPECT_EQ(ap.verdict, Verdict::invalid);
    ASSERT_TRUE(std::holds_alternative<ApModWitness>(*ap.violation));
    const auto w = std::get<ApModWitness>(*ap.violation);
    EXPECT_EQ((w.x + 2 * 9 - 2 * w.y + w.z) % 9, 0u);

    const auto unc = verify_near_modular(V{0}, 3);
    EXPECT_EQ(unc.verdict, Verdict::invalid);
    ASSERT_TRUE(std::holds_alternative<UncoveredResidue>(*unc.violation));
    EXPECT_EQ(std::get<UncoveredResidue>(*unc.violation).residue, 1u);

    EXPECT_TRUE(std::holds_alternative<MissingZero>(*verify_near_modular(V{1, 2}, 3).violation));
    EXPECT_THROW(verify_near_modular(V{0, 0}, 3), invalid_input);
    EXPECT_THROW(verify_near_modular(V{0}, 0), invalid_input);
}

TEST(VerifyNearModular, CongruentElementsAreAProgression)
{
    // 0 and 9 coincide mod 9: x = 9, y = z = 0 gives 9 = 2*0 - 0.
    const auto r = verify_near_modular(V{0, 2, 9}, 9);
    EXPECT_EQ(r.verdict, Verdict::invalid);
    EXPECT_TRUE(std::holds_alternative<ApModWitness>(*r.violation));
}

TEST(VerifyNearModular, AgreesWithDefinitionOnRandomSets)
{
    std::mt19937_64 rng(5);
    int positives = 0;
    for (int t = 0; t < 4000; ++t) {
        const value_t n = 1 + rng() % 27;
        V a{0};
        const std::size_t size = rng() % 6;
        for (std::size_t i = 0; i < size; ++i)
            a.push_back(rng() % (2 * n + 3));
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        const auto near = verify_near_modular(a, n);
        ASSERT_EQ(near.ok(), oracle::near_modular(a, n));
        ASSERT_EQ(verify_modular(a, n).ok(), oracle::modular(a, n));
        if (verify_modular(a, n).verdict == Verdict::modular) {
            EXPECT_TRUE(near.ok()); // modular implies near-modular
            ++positives;
        }
    }
    EXPECT_GT(positives, 0);
}

TEST(FamilyTable, ShapeInvariants)
{
    for (unsigned i = family_min_level; i <= family_max_level; ++i) {
        value_t three_i = 1;
        for (unsigned k = 0; k < i; ++k)
            three_i *= 3;
        for (Family f : {Family::A, Family::B}) {
            const auto s = family_set(i, f, 0);
            EXPECT_EQ(s.elements.size(), std::size_t{1} << (i + 1));
            EXPECT_EQ(s.modulus, 3 * three_i);
            EXPECT_EQ(s.elements.back(), (f == Family::A ? 2 : 4) * three_i);
            EXPECT_TRUE(std::is_sorted(s.elements.begin(), s.elements.end()));
            EXPECT_EQ(s.elements.front(), 0u);
        }
    }
    EXPECT_THROW(family_set(0, Family::A, 0), invalid_input);
    EXPECT_THROW(family_set(5, Family::B, 0), invalid_input);
}

TEST(FamilyTable, ShiftedSetsStayNearModular)
{
    for (unsigned i = family_min_level; i <= family_max_level; ++i) {
        for (Family f : {Family::A, Family::B}) {
            for (std::uint64_t j = 0; j <= family_verified_shifts; ++j) {
                const auto s = family_set(i, f, j);
                EXPECT_TRUE(verify_near_modular(s.elements, s.modulus).ok())
                    << to_string(f) << i << " j=" << j;
                if (i <= 2) {
                    EXPECT_TRUE(oracle::near_modular(s.elements, s.modulus)) << to_string(f) << i << " j=" << j;
                }
            }
        }
    }
}

TEST(ExpandModular, Examples)
{
    EXPECT_EQ(expand_modular(V{0}, 1, Bound::terms(8)), (V{0, 1, 3, 4, 9, 10, 12, 13}));
    EXPECT_EQ(expand_modular(V{0, 1}, 3, Bound::terms(8)), (V{0, 1, 3, 4, 9, 10, 12, 13}));
    EXPECT_EQ(expand_modular(V{0, 2, 5, 6}, 9, Bound::terms(12)), (V{0, 2, 5, 6, 9, 11, 14, 15, 27, 29, 32, 33}));
    EXPECT_EQ(expand_modular(V{0, 2, 5, 6}, 9, Bound::up_to(14)), (V{0, 2, 5, 6, 9, 11, 14}));
    EXPECT_THROW(expand_modular(V{0, 4, 10, 12}, 9, Bound::terms(4)), invalid_input);
}

namespace {

// All subsets of [0, n) containing 0, of size <= max_size, with no AP mod n
// (checked by the oracle at every extension).
void ap_free_mod(value_t n, std::size_t max_size, V& cur, std::vector<V>& out)
{
    out.push_back(cur);
    if (cur.size() == max_size)
        return;
    for (value_t e = cur.back() + 1; e < n; ++e) {
        cur.push_back(e);
        bool ok = true;
        for (value_t x : cur)
            for (value_t y : cur)
                for (value_t z : cur)
                    if ((x + 2 * n - 2 * y + z) % n == 0 && !(x == y && y == z))
                        ok = false;
        if (ok)
            ap_free_mod(n, max_size, cur, out);
        cur.pop_back();
    }
}

} // namespace

TEST(ExpandModular, GreedyGenerationAgrees)
{
    int checked = 0;
    for (value_t n = 1; n <= 27; ++n) {
        std::vector<V> cands;
        V cur{0};
        ap_free_mod(n, 8, cur, cands);
        for (const auto& a : cands) {
            if (verify_modular(a, n).verdict != Verdict::modular)
                continue;
            const auto expanded = expand_modular(a, n, Bound::terms(200));
            const auto greedy = generate(a, Bound::terms(200)).terms;
            ASSERT_EQ(greedy, expanded) << "modulus " << n << " set size " << a.size();
            ++checked;
        }
    }
    EXPECT_GT(checked, 10);
}

namespace {

std::vector<V> naive_search(unsigned ell, value_t max_element)
{
    value_t n = 1;
    for (unsigned k = 0; k <= ell; ++k)
        n *= 3;
    const std::size_t size = std::size_t{1} << (ell + 1);
    std::vector<V> out;
    if (max_element + 1 < size)
        return out;
    // every subset of {1..max_element-1} of size - 2
    const value_t inner = max_element - 1;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << inner); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != size - 2)
            continue;
        V s{0};
        for (value_t k = 0; k < inner; ++k)
            if (mask >> k & 1)
                s.push_back(k + 1);
        s.push_back(max_element);
        if (oracle::near_modular(s, n))
            out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<V> elements_of(const std::vector<NearModularSet>& sets)
{
    std::vector<V> out;
    for (const auto& s : sets)
        out.push_back(s.elements);
    return out;
}

} // namespace

TEST(SearchNearModular, KnownSetsAreFound)
{
    auto contains = [](const std::vector<NearModularSet>& r, const V& s) {
        return std::any_of(r.begin(), r.end(), [&](const NearModularSet& m) { return m.elements == s; });
    };
    EXPECT_TRUE(contains(search_near_modular({1, 6}), V{0, 2, 5, 6}));
    EXPECT_TRUE(contains(search_near_modular({1, 12}), V{0, 4, 10, 12}));
    const auto a2 = family_set(2, Family::A, 0);
    const auto r2 = search_near_modular({2, 18});
    EXPECT_TRUE(contains(r2, a2.elements));
    for (const auto& s : r2)
        EXPECT_EQ(s.modulus, 27u);
}

TEST(SearchNearModular, TooSmallMaximumIsEmpty)
{
    EXPECT_TRUE(search_near_modular({1, 1}).empty());
    EXPECT_TRUE(search_near_modular({1, 2}).empty());
}

TEST(SearchNearModular, MatchesUnprunedEnumeration)
{
    for (value_t m = 1; m <= 24; ++m) {
        const auto found = search_near_modular({1, m});
        ASSERT_EQ(elements_of(found), naive_search(1, m)) << "max_element " << m;
    }
}

TEST(SearchNearModular, WorkerCountDoesNotChangeResults)
{
    for (value_t m : {18u, 24u, 30u, 36u}) {
        SearchOptions opt{2, m};
        const auto serial = search_near_modular(opt);
        ASSERT_TRUE(std::is_sorted(serial.begin(), serial.end()));
        ASSERT_EQ(std::adjacent_find(serial.begin(), serial.end()), serial.end());
        for (unsigned w : {2u, 3u, 8u}) {
            opt.workers = w;
            EXPECT_EQ(search_near_modular(opt), serial) << "workers " << w;
        }
        opt.first_only = true;
        for (unsigned w : {1u, 4u}) {
            opt.workers = w;
            const auto first = search_near_modular(opt);
            if (serial.empty()) {
                EXPECT_TRUE(first.empty());
            } else {
                ASSERT_EQ(first.size(), 1u);
                EXPECT_EQ(first.front(), serial.front());
            }
        }
    }
}

TEST(SearchNearModular, BudgetExhaustionIsAnError)
{
    SearchOptions opt{2, 18};
    opt.node_budget = 50;
    EXPECT_THROW(search_near_modular(opt), resource_error);
    opt.workers = 4;
    EXPECT_THROW(search_near_modular(opt), resource_error);
    EXPECT_THROW(search_near_modular({0, 6}), invalid_input);
}
