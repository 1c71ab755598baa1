#pragma once

// Constructive realization of even characters and the residue bookkeeping
// behind it.
//
// Characters = 0, 2 (mod 6) come from basic sequences: a head b_0..b_m with
// b_i = l_i 3^i, 3 not dividing l_i, followed by b_k = 3^k, has character
// 2 * sum (b_i - 3^i) provided 3^(m+1) > sum b_i.
//
// Characters = 4 (mod 6) come from composing A_i^j or B_i^j with the tail
// b_k = 3^(k+i+1); the character is 3^i + 1 + 2j 3^(i+1) (family A) or
// 5 3^i + 1 + 2j 3^(i+1) (family B). Together the eight families cover every
// residue = 4 (mod 6) modulo 486 except 244.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "stanley/arith.hpp"
#include "stanley/basis.hpp"
#include "stanley/core.hpp"
#include "stanley/modsets.hpp"
#include "stanley/structure.hpp"

namespace stanley {

struct BasisRecipe {
    std::vector<value_t> head; // tail b_k = 3^k

    friend bool operator==(const BasisRecipe&, const BasisRecipe&) = default;
};

struct FamilyRecipe {
    unsigned level = 1; // i in 1..4
    Family family = Family::A;
    std::uint64_t shift = 0; // j

    friend bool operator==(const FamilyRecipe&, const FamilyRecipe&) = default;
};

struct CharacterPlan {
    std::uint64_t target = 0;
    std::variant<BasisRecipe, FamilyRecipe> recipe;

    bool is_basis() const { return std::holds_alternative<BasisRecipe>(recipe); }
};

/// 3^i + 1 (A) or 5 * 3^i + 1 (B).
inline std::uint64_t family_base_character(unsigned level, Family f)
{
    const std::uint64_t p = arith::pow3(level);
    return (f == Family::A ? p : 5 * p) + 1;
}

/// 2 * 3^(i+1): the step between consecutive shifts j.
inline std::uint64_t family_character_step(unsigned level) { return 2 * arith::pow3(level + 1); }

inline std::uint64_t family_character(const FamilyRecipe& r)
{
    return arith::checked_add(family_base_character(r.level, r.family),
                              arith::checked_mul(r.shift, family_character_step(r.level)));
}

/// 2 * sum (b_i - 3^i); throws if some b_i < 3^i.
inline std::uint64_t basis_head_character(std::span<const value_t> head)
{
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < head.size(); ++i) {
        const value_t p = arith::pow3(static_cast<unsigned>(i));
        if (head[i] < p)
            throw verification_error("basis head entry below 3^i");
        sum = arith::checked_add(sum, head[i] - p);
    }
    return arith::checked_mul(sum, 2);
}

namespace detail {

// Digits d_i = b_i / 3^i - 1 with d_i mod 3 in {0, 1} and sum d_i 3^i = t.
inline bool assign_digits(std::uint64_t t, std::size_t pos, std::size_t len, std::vector<std::uint64_t>& d,
                          std::uint64_t& nodes)
{
    if (++nodes > 10'000'000)
        throw resource_error("basis planner search budget exhausted");
    if (pos + 1 == len) {
        if (t % 3 == 2)
            return false;
        d[pos] = t;
        return true;
    }
    const std::uint64_t r = t % 3;
    if (r == 2)
        return false;
    for (std::uint64_t di = r; di <= t; di += 3) {
        if (di % 3 == 2)
            continue;
        d[pos] = di;
        if (assign_digits((t - di) / 3, pos + 1, len, d, nodes))
            return true;
    }
    return false;
}

inline void check_basis_recipe(const BasisRecipe& r, std::uint64_t target)
{
    const Basis b{r.head, 0, TailRule::power};
    const auto rep = verify_basis(b);
    if (!rep.valid)
        throw verification_error("planner emitted an invalid head: " + rep.reason);
    if (basis_head_character(r.head) != target)
        throw verification_error("planner emitted a head with the wrong character sum");
    value_t sum = 0;
    for (value_t x : r.head)
        sum = arith::checked_add(sum, x);
    if (!(b.at(r.head.size()) > sum))
        throw verification_error("planner emitted a head that is not dominated by its tail");
}

} // namespace detail

/// Shortest head (lexicographically smallest among those) with character
/// 2t, t = target / 2. Requires t = 0, 1 (mod 3).
inline BasisRecipe plan_basis_head(std::uint64_t target)
{
    const std::uint64_t t = target / 2;
    std::size_t len = 1;
    // tail domination: 3^len > sum b_i = t + (3^len - 1) / 2
    while ((arith::pow3(static_cast<unsigned>(len)) - 1) / 2 < t)
        ++len;
    std::uint64_t nodes = 0;
    for (std::size_t extra = 0; extra < 4; ++extra, ++len) {
        std::vector<std::uint64_t> d(len);
        if (detail::assign_digits(t, 0, len, d, nodes)) {
            BasisRecipe r;
            for (std::size_t i = 0; i < len; ++i)
                r.head.push_back(arith::checked_mul(d[i] + 1, arith::pow3(static_cast<unsigned>(i))));
            detail::check_basis_recipe(r, target);
            return r;
        }
    }
    throw verification_error("no basis head found for character " + std::to_string(target));
}

/// Recipe realizing `target`. Throws invalid_input for negative or odd
/// targets and not_covered for targets = 244 (mod 486).
inline CharacterPlan plan_character(std::int64_t target)
{
    if (target < 0)
        throw invalid_input("character " + std::to_string(target) + " is negative; characters are nonnegative");
    const auto lambda = static_cast<std::uint64_t>(target);
    if (lambda % 2 == 1)
        throw invalid_input("character " + std::to_string(lambda)
                            + " is odd; no general construction is known (see the explore command for "
                              "characters of basic sequences)");
    if (lambda % 6 != 4)
        return {lambda, plan_basis_head(lambda)};
    for (unsigned i = family_min_level; i <= family_max_level; ++i) {
        for (Family f : {Family::A, Family::B}) {
            const std::uint64_t base = family_base_character(i, f);
            const std::uint64_t step = family_character_step(i);
            if (lambda % step == base)
                return {lambda, FamilyRecipe{i, f, (lambda - base) / step}};
        }
    }
    throw not_covered("character " + std::to_string(lambda)
                      + " = 244 (mod 486) is not covered by the A/B family construction; other "
                        "constructions are not ruled out");
}

inline Basis plan_basis(const BasisRecipe& r) { return Basis{r.head, 0, TailRule::power}; }

inline ComposedSystem plan_system(const FamilyRecipe& r)
{
    auto a = family_set(r.level, r.family, r.shift);
    return ComposedSystem::make(std::move(a.elements), r.level + 1, Basis{{}, r.level + 1, TailRule::power});
}

/// Sequence the plan describes, computed algebraically (no greedy step).
inline std::vector<value_t> realize_plan(const CharacterPlan& plan, Bound bound)
{
    if (const auto* b = std::get_if<BasisRecipe>(&plan.recipe))
        return expand_basis(plan_basis(*b), bound);
    return compose(plan_system(std::get<FamilyRecipe>(plan.recipe)), bound);
}

/// Modular set that seeds the greedy generation of the plan's sequence.
inline std::vector<value_t> plan_seed(const CharacterPlan& plan)
{
    if (const auto* b = std::get_if<BasisRecipe>(&plan.recipe))
        return generating_seed(plan_basis(*b));
    return modularize(plan_system(std::get<FamilyRecipe>(plan.recipe))).elements;
}

/// Checks the realization against greedy generation from the plan's seed and
/// returns the independence certificate, whose character must equal the target.
///
/// The identities are checked up to K = max(depth, log2 |seed| + 1): the
/// sequence cannot lock in before its modular seed is exhausted, so smaller
/// K would reject valid plans with large seeds.
inline IndependenceCertificate verify_plan(const CharacterPlan& plan, unsigned depth)
{
    const auto seed = plan_seed(plan);
    const unsigned k = std::max(depth, arith::floor_log2(seed.size()) + 1);
    const std::uint64_t count = std::uint64_t{1} << (k + 1);

    const auto realized = realize_plan(plan, Bound::terms(count));
    const auto greedy = generate(seed, Bound::terms(count)).terms;
    const auto diff = std::mismatch(realized.begin(), realized.end(), greedy.begin(), greedy.end());
    if (diff.first != realized.end() || diff.second != greedy.end()) {
        const auto at = static_cast<std::size_t>(diff.first - realized.begin());
        throw verification_error("realization and greedy generation differ at index " + std::to_string(at));
    }
    const auto report = analyze_independence(realized, k);
    if (!report.independent())
        throw verification_error("realized sequence for character " + std::to_string(plan.target)
                                 + " is not independent up to depth " + std::to_string(k));
    if (report.certificate->character != static_cast<std::int64_t>(plan.target))
        throw verification_error("realized character " + std::to_string(report.certificate->character)
                                 + " differs from target " + std::to_string(plan.target));
    return *report.certificate;
}

// ---------------------------------------------------------------------------

struct CoverSource {
    enum class Kind { basis_digits, family } kind = Kind::basis_digits;
    unsigned level = 0;
    Family family = Family::A;

    friend bool operator==(const CoverSource&, const CoverSource&) = default;
};

inline std::string to_string(const CoverSource& c)
{
    if (c.kind == CoverSource::Kind::basis_digits)
        return "basis";
    return std::string(to_string(c.family)) + std::to_string(c.level);
}

struct CoverageEntry {
    std::uint64_t residue = 0;
    std::optional<CoverSource> source;
};

struct CoverageMap {
    std::uint64_t modulus = 486;
    std::vector<CoverageEntry> entries; // even residues in increasing order

    std::vector<std::uint64_t> uncovered() const
    {
        std::vector<std::uint64_t> out;
        for (const auto& e : entries)
            if (!e.source)
                out.push_back(e.residue);
        return out;
    }
};

/// Assigns every even residue mod `modulus` to the first construction whose
/// character progression meets that class, i.e. r = base (mod gcd(modulus,
/// 2 * 3^(i+1))). When the period divides the modulus this means the whole
/// class is realized by the family.
inline CoverageMap residue_coverage(std::uint64_t modulus = 486)
{
    if (modulus == 0 || modulus % 6 != 0)
        throw invalid_input("coverage modulus must be a positive multiple of 6");
    if (modulus > (std::uint64_t{1} << 32))
        throw resource_error("coverage modulus too large");
    CoverageMap map{modulus, {}};
    for (std::uint64_t r = 0; r < modulus; r += 2) {
        CoverageEntry e{r, std::nullopt};
        if (r % 6 != 4) {
            e.source = CoverSource{CoverSource::Kind::basis_digits, 0, Family::A};
        } else {
            for (unsigned i = family_min_level; i <= family_max_level && !e.source; ++i) {
                const std::uint64_t g = std::gcd(modulus, family_character_step(i));
                for (Family f : {Family::A, Family::B}) {
                    if (r % g == family_base_character(i, f) % g) {
                        e.source = CoverSource{CoverSource::Kind::family, i, f};
                        break;
                    }
                }
            }
        }
        map.entries.push_back(e);
    }
    return map;
}

/// Coverage source the planner uses for `lambda` (lambda even, nonnegative).
inline CoverSource plan_source(const CharacterPlan& plan)
{
    if (plan.is_basis())
        return {CoverSource::Kind::basis_digits, 0, Family::A};
    const auto& f = std::get<FamilyRecipe>(plan.recipe);
    return {CoverSource::Kind::family, f.level, f.family};
}

// ---------------------------------------------------------------------------

struct ExploreOptions {
    std::size_t max_head_length = 3;
    value_t max_entry = 12;
    unsigned depth = 6;
    unsigned workers = 1;
    std::uint64_t candidate_budget = 1'000'000;
};

struct ExploredBasis {
    std::vector<value_t> head;
    TailRule tail = TailRule::power;
    IndependenceCertificate certificate;
};

namespace detail {

inline std::optional<IndependenceCertificate> probe_basis(const Basis& b, unsigned depth)
{
    std::vector<value_t> seed;
    try {
        seed = generating_seed(b);
    } catch (const verification_error&) {
        return std::nullopt; // colliding subset sums
    }
    if (seed.size() > (std::size_t{1} << 16))
        return std::nullopt;
    const unsigned k = std::max(depth, arith::floor_log2(seed.size()) + 1);
    const std::uint64_t count = std::uint64_t{1} << (k + 1);
    const auto expansion = expand_basis(b, Bound::terms(count));
    std::vector<value_t> greedy;
    try {
        greedy = generate(seed, Bound::terms(count)).terms;
    } catch (const invalid_seed&) {
        return std::nullopt;
    }
    if (greedy != expansion)
        return std::nullopt;
    const auto rep = analyze_independence(expansion, k);
    return rep.certificate;
}

} // namespace detail

/// Enumerates strictly increasing heads with entries in [1, max_entry] and
/// both tail rules, keeps the bases whose expansion is the greedy extension
/// of its generating seed, and reports each one's observed character.
/// Exploratory only: no completeness claim is made.
inline std::vector<ExploredBasis> explore_basic_characters(const ExploreOptions& opt)
{
    struct Candidate {
        std::vector<value_t> head;
        TailRule tail;
    };
    std::vector<Candidate> candidates;
    std::vector<value_t> cur;
    auto enumerate = [&](auto&& self, value_t lo) -> void {
        if (!cur.empty()) {
            for (TailRule t : {TailRule::power, TailRule::tripling}) {
                if (candidates.size() >= opt.candidate_budget)
                    throw resource_error("explore: candidate budget of " + std::to_string(opt.candidate_budget)
                                         + " exhausted");
                candidates.push_back({cur, t});
            }
        }
        if (cur.size() == opt.max_head_length)
            return;
        for (value_t v = lo + 1; v <= opt.max_entry; ++v) {
            cur.push_back(v);
            self(self, v);
            cur.pop_back();
        }
    };
    enumerate(enumerate, 0);

    std::vector<std::optional<IndependenceCertificate>> certs(candidates.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    auto work = [&] {
        try {
            for (std::size_t c; (c = next.fetch_add(1)) < candidates.size();)
                certs[c] = detail::probe_basis(Basis{candidates[c].head, 0, candidates[c].tail}, opt.depth);
        } catch (...) {
            std::lock_guard lock(err_mu);
            if (!err)
                err = std::current_exception();
            next.store(candidates.size());
        }
    };
    const unsigned nthreads = std::max(1u, opt.workers);
    if (nthreads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    if (err)
        std::rethrow_exception(err);

    std::vector<ExploredBasis> out;
    for (std::size_t c = 0; c < candidates.size(); ++c)
        if (certs[c])
            out.push_back({candidates[c].head, candidates[c].tail, *certs[c]});
    return out;
}

} // namespace stanley
