#pragma once

// Modular and near-modular sets: verification, expansion, the A/B families
// and an exhaustive search.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "stanley/arith.hpp"
#include "stanley/core.hpp"

namespace stanley {

struct NearModularSet {
    std::vector<value_t> elements; // strictly increasing
    value_t modulus = 1;

    friend bool operator==(const NearModularSet&, const NearModularSet&) = default;
    friend auto operator<=>(const NearModularSet& a, const NearModularSet& b)
    {
        return a.elements <=> b.elements;
    }
};

enum class Verdict { modular, near_modular, invalid };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::modular:
        return "modular";
    case Verdict::near_modular:
        return "near-modular";
    case Verdict::invalid:
        return "invalid";
    }
    return "?";
}

struct MissingZero {};
struct OutOfRange {
    value_t element;
};
/// x = 2y - z (mod N) with x, y, z not all equal.
struct ApModWitness {
    value_t x, y, z;
};
struct UncoveredResidue {
    value_t residue;
};

using ModSetViolation = std::variant<MissingZero, OutOfRange, ApModWitness, UncoveredResidue>;

inline std::string describe(const ModSetViolation& v)
{
    struct {
        std::string operator()(MissingZero) const { return "set does not contain 0"; }
        std::string operator()(OutOfRange o) const
        {
            return "element " + std::to_string(o.element) + " is not below the modulus";
        }
        std::string operator()(ApModWitness w) const
        {
            return "progression mod N: " + std::to_string(w.x) + " = 2*" + std::to_string(w.y) + " - "
                   + std::to_string(w.z);
        }
        std::string operator()(UncoveredResidue u) const
        {
            return "residue " + std::to_string(u.residue) + " is not of the form 2y - z with y >= z";
        }
    } visitor;
    return std::visit(visitor, v);
}

struct ModSetReport {
    Verdict verdict = Verdict::invalid;
    std::optional<ModSetViolation> violation;

    bool ok() const { return verdict != Verdict::invalid; }
};

namespace detail {

inline std::vector<value_t> normalized(std::span<const value_t> a)
{
    std::vector<value_t> s(a.begin(), a.end());
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw invalid_input("set has duplicate elements");
    return s;
}

// 2y - z mod n without overflow
inline value_t twice_minus(value_t y, value_t z, value_t n)
{
    const unsigned __int128 yy = y % n;
    const unsigned __int128 zz = z % n;
    return static_cast<value_t>((2 * yy + n - zz) % n);
}

inline constexpr value_t max_verify_modulus = value_t{1} << 32;

inline std::optional<ModSetViolation> first_ap_mod(const std::vector<value_t>& s, value_t n)
{
    // residue -> elements with that residue; bucketed by sorting
    std::vector<std::pair<value_t, value_t>> by_res;
    by_res.reserve(s.size());
    for (value_t v : s)
        by_res.emplace_back(v % n, v);
    std::sort(by_res.begin(), by_res.end());
    for (value_t y : s) {
        for (value_t z : s) {
            const value_t r = twice_minus(y, z, n);
            auto it = std::lower_bound(by_res.begin(), by_res.end(), std::pair<value_t, value_t>{r, 0});
            for (; it != by_res.end() && it->first == r; ++it) {
                const value_t x = it->second;
                if (!(x == y && y == z))
                    return ApModWitness{x, y, z};
            }
        }
    }
    return std::nullopt;
}

inline std::optional<ModSetViolation> first_uncovered(const std::vector<value_t>& s, value_t n)
{
    std::vector<char> covered(n, 0);
    value_t count = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) { // y = s[i] >= z = s[j]
            const value_t r = twice_minus(s[i], s[j], n);
            if (!covered[r]) {
                covered[r] = 1;
                if (++count == n)
                    return std::nullopt;
            }
        }
    }
    for (value_t r = 0; r < n; ++r)
        if (!covered[r])
            return UncoveredResidue{r};
    return std::nullopt;
}

inline void check_modulus(value_t n)
{
    if (n < 1)
        throw invalid_input("modulus must be positive");
    if (n > max_verify_modulus)
        throw resource_error("modulus " + std::to_string(n) + " too large for exhaustive coverage check");
}

} // namespace detail

/// Near-modular check: 0 in A, no nontrivial AP mod N, and every residue
/// 0..N-1 equals 2y - z mod N for some y >= z in A. A passing set is reported
/// as modular when additionally A is a subset of [0, N).
inline ModSetReport verify_near_modular(std::span<const value_t> a, value_t n)
{
    detail::check_modulus(n);
    const auto s = detail::normalized(a);
    if (s.empty() || s.front() != 0)
        return {Verdict::invalid, MissingZero{}};
    if (auto v = detail::first_ap_mod(s, n))
        return {Verdict::invalid, v};
    if (auto v = detail::first_uncovered(s, n))
        return {Verdict::invalid, v};
    return {s.back() < n ? Verdict::modular : Verdict::near_modular, std::nullopt};
}

inline ModSetReport verify_modular(std::span<const value_t> a, value_t n)
{
    detail::check_modulus(n);
    const auto s = detail::normalized(a);
    if (s.empty() || s.front() != 0)
        return {Verdict::invalid, MissingZero{}};
    if (s.back() >= n)
        return {Verdict::invalid, OutOfRange{*std::find_if(s.begin(), s.end(), [n](value_t v) { return v >= n; })}};
    return verify_near_modular(s, n);
}

/// Sorted elements of A + N * S(0) up to `bound`. A must be modular mod N.
inline std::vector<value_t> expand_modular(std::span<const value_t> a, value_t n, Bound bound)
{
    const auto rep = verify_modular(a, n);
    if (rep.verdict != Verdict::modular)
        throw invalid_input("expand_modular: set is not modular: " + describe(*rep.violation));
    const auto s = detail::normalized(a);
    std::vector<value_t> out;
    for (std::uint64_t m = 0;; ++m) {
        const value_t base = arith::checked_mul(n, arith::binary_as_ternary(m));
        for (value_t x : s) {
            const value_t v = arith::checked_add(base, x);
            if (!bound.admits(out.size(), v))
                return out;
            out.push_back(v);
        }
    }
}

// ---------------------------------------------------------------------------
// The A_i^j / B_i^j families (i = 1..4): near-modular mod 3^(i+1), 2^(i+1)
// elements, largest element 2*3^i (A) or 4*3^i (B). The j-th member adds
// j*3^(i+1) to the largest element.

enum class Family { A, B };

inline const char* to_string(Family f) { return f == Family::A ? "A" : "B"; }

namespace detail {

inline constexpr std::array<value_t, 4> family_a1{0, 2, 5, 6};
inline constexpr std::array<value_t, 4> family_b1{0, 4, 10, 12};
inline constexpr std::array<value_t, 8> family_a2{0, 1, 4, 6, 10, 13, 15, 18};
inline constexpr std::array<value_t, 8> family_b2{0, 2, 8, 12, 20, 26, 30, 36};
inline constexpr std::array<value_t, 16> family_a3{0, 2, 3, 5, 11, 14, 18, 21, 29, 30, 32, 38, 41, 45, 48, 54};
inline constexpr std::array<value_t, 16> family_b3{0, 4, 6, 10, 22, 28, 36, 42, 58, 60, 64, 76, 82, 90, 96, 108};
inline constexpr std::array<value_t, 32> family_a4{0,   2,   8,   9,   15,  20,  24,  26,  54,  56,  62,
                                                   63,  69,  74,  78,  80,  83,  89,  90,  96,  101, 105,
                                                   107, 135, 137, 143, 144, 150, 155, 159, 161, 162};
inline constexpr std::array<value_t, 32> family_b4{0,   4,   16,  18,  30,  40,  48,  52,  108, 112, 124,
                                                   126, 138, 148, 156, 160, 166, 178, 180, 192, 202, 210,
                                                   214, 270, 274, 286, 288, 300, 310, 318, 322, 324};

} // namespace detail

inline constexpr unsigned family_min_level = 1;
inline constexpr unsigned family_max_level = 4;
/// Shifts j in [0, family_verified_shifts] are checked by the test suite.
inline constexpr std::uint64_t family_verified_shifts = 3;

inline std::span<const value_t> family_base(unsigned i, Family f)
{
    switch (i) {
    case 1:
        return f == Family::A ? std::span<const value_t>(detail::family_a1) : detail::family_b1;
    case 2:
        return f == Family::A ? std::span<const value_t>(detail::family_a2) : detail::family_b2;
    case 3:
        return f == Family::A ? std::span<const value_t>(detail::family_a3) : detail::family_b3;
    case 4:
        return f == Family::A ? std::span<const value_t>(detail::family_a4) : detail::family_b4;
    default:
        throw invalid_input("family level must be in 1..4, got " + std::to_string(i));
    }
}

inline value_t family_modulus(unsigned i)
{
    (void)family_base(i, Family::A);
    return arith::pow3(i + 1);
}

/// A_i^j or B_i^j with its modulus 3^(i+1).
inline NearModularSet family_set(unsigned i, Family f, std::uint64_t j)
{
    auto base = family_base(i, f);
    NearModularSet s{{base.begin(), base.end()}, family_modulus(i)};
    s.elements.back() = arith::checked_add(s.elements.back(), arith::checked_mul(j, s.modulus));
    return s;
}

// ---------------------------------------------------------------------------
// Exhaustive search for near-modular sets mod 3^(ell+1) of size 2^(ell+1).

struct SearchOptions {
    unsigned ell = 1;
    value_t max_element = 0;
    std::uint64_t node_budget = 100'000'000;
    unsigned workers = 1;
    bool first_only = false;
};

namespace detail {

/// Forbidden-residue counters for incremental AP-mod-N pruning. A residue r
/// is forbidden for a new element e when e = r would create a nontrivial
/// progression mod N with the current members: r is a member residue, or
/// r = 2y - z, or 2r = x + z (N odd, so halving is exact).
class ResidueGuard {
public:
    explicit ResidueGuard(value_t n) : n_(n), half_((n + 1) / 2), count_(n, 0) {}

    bool allowed(value_t e) const { return count_[e % n_] == 0; }

    void push(value_t e)
    {
        apply(e, +1);
        members_.push_back(e);
    }

    void pop()
    {
        const value_t e = members_.back();
        members_.pop_back();
        apply(e, -1);
    }

    const std::vector<value_t>& members() const { return members_; }

private:
    void apply(value_t e, int delta)
    {
        const value_t re = e % n_;
        bump(re, delta);
        for (value_t s : members_) {
            const value_t rs = s % n_;
            bump(twice_minus(e, s, n_), delta);
            bump(twice_minus(s, e, n_), delta);
            const unsigned __int128 mid = (static_cast<unsigned __int128>(re) + rs) * half_;
            bump(static_cast<value_t>(mid % n_), delta);
        }
    }

    void bump(value_t r, int delta) { count_[r] = static_cast<std::uint32_t>(static_cast<int>(count_[r]) + delta); }

    value_t n_;
    value_t half_;
    std::vector<std::uint32_t> count_;
    std::vector<value_t> members_;
};

class NodeBudget {
public:
    explicit NodeBudget(std::uint64_t limit) : limit_(limit) {}

    void spend()
    {
        if (used_.fetch_add(1, std::memory_order_relaxed) + 1 > limit_)
            throw resource_error("search node budget of " + std::to_string(limit_) + " exhausted");
    }

private:
    std::uint64_t limit_;
    std::atomic<std::uint64_t> used_{0};
};

struct SearchShape {
    value_t modulus;
    std::size_t size;
    value_t max_element;
};

/// Depth-first extension of `guard` with increasing interior elements > lo.
/// Calls `emit` on every complete candidate that passes the full check;
/// returns false when emit asked to stop.
template <class Emit>
bool extend(ResidueGuard& guard, value_t lo, const SearchShape& shape, NodeBudget& budget, Emit& emit)
{
    const std::size_t have = guard.members().size(); // includes 0 and max_element
    if (have == shape.size) {
        std::vector<value_t> set = guard.members();
        std::sort(set.begin(), set.end());
        if (verify_near_modular(set, shape.modulus).ok())
            return emit(NearModularSet{std::move(set), shape.modulus});
        return true;
    }
    const std::size_t remaining = shape.size - have;
    // leave room for remaining - 1 further elements below max_element
    if (shape.max_element < remaining)
        return true;
    const value_t top = shape.max_element - remaining; // largest admissible choice
    for (value_t e = lo + 1; e <= top; ++e) {
        budget.spend();
        if (!guard.allowed(e))
            continue;
        guard.push(e);
        const bool go_on = extend(guard, e, shape, budget, emit);
        guard.pop();
        if (!go_on)
            return false;
    }
    return true;
}

} // namespace detail

/// All near-modular sets mod 3^(ell+1) with 2^(ell+1) elements, containing 0
/// and with largest element exactly max_element, in lexicographic order.
///
/// The tree is split into branches by the first two interior elements;
/// branches run on `workers` threads and are merged in branch order, so the
/// result does not depend on the worker count. With first_only the
/// lexicographically first set is returned (or none).
inline std::vector<NearModularSet> search_near_modular(const SearchOptions& opt)
{
    if (opt.ell < 1)
        throw invalid_input("search_near_modular: ell must be at least 1");
    if (opt.ell > 10)
        throw invalid_input("search_near_modular: ell too large");
    const detail::SearchShape shape{arith::pow3(opt.ell + 1), std::size_t{1} << (opt.ell + 1), opt.max_element};
    if (opt.max_element + 1 < shape.size)
        return {};

    detail::NodeBudget budget(opt.node_budget);
    detail::ResidueGuard root(shape.modulus);
    root.push(0);
    if (!root.allowed(opt.max_element))
        return {};
    root.push(opt.max_element);

    // Branch prefixes: up to two interior elements, enumerated in lex order.
    std::vector<std::vector<value_t>> prefixes;
    const std::size_t interior = shape.size - 2;
    const std::size_t depth = std::min<std::size_t>(2, interior);
    {
        std::vector<value_t> cur;
        auto collect = [&](auto&& self, value_t lo) -> void {
            if (cur.size() == depth) {
                prefixes.push_back(cur);
                return;
            }
            const std::size_t remaining = interior - cur.size();
            if (opt.max_element < remaining)
                return;
            for (value_t e = lo + 1; e <= opt.max_element - remaining; ++e) {
                budget.spend();
                if (!root.allowed(e))
                    continue;
                root.push(e);
                cur.push_back(e);
                self(self, e);
                cur.pop_back();
                root.pop();
            }
        };
        collect(collect, 0);
    }

    std::vector<std::vector<NearModularSet>> found(prefixes.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> best{prefixes.size()}; // lowest branch with a hit (first_only)
    std::mutex err_mu;
    std::exception_ptr err;

    auto work = [&] {
        try {
            detail::ResidueGuard guard(shape.modulus);
            for (std::size_t b; (b = next.fetch_add(1)) < prefixes.size();) {
                if (opt.first_only && b > best.load())
                    continue;
                while (!guard.members().empty())
                    guard.pop();
                guard.push(0);
                guard.push(opt.max_element);
                for (value_t e : prefixes[b])
                    guard.push(e);
                auto& out = found[b];
                auto emit = [&](NearModularSet s) {
                    out.push_back(std::move(s));
                    if (!opt.first_only)
                        return true;
                    std::size_t cur = best.load();
                    while (b < cur && !best.compare_exchange_weak(cur, b)) {
                    }
                    return false;
                };
                detail::extend(guard, prefixes[b].empty() ? 0 : prefixes[b].back(), shape, budget, emit);
            }
        } catch (...) {
            std::lock_guard lock(err_mu);
            if (!err)
                err = std::current_exception();
            next.store(prefixes.size());
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

    std::vector<NearModularSet> result;
    for (auto& branch : found) {
        for (auto& s : branch) {
            result.push_back(std::move(s));
            if (opt.first_only)
                return result;
        }
    }
    return result;
}

} // namespace stanley
