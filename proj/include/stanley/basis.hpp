#pragma once

// Bases (b_k) with eventually geometric tails, their subset-sum expansions,
// and composition of a near-modular set with a basis tail.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stanley/arith.hpp"
#include "stanley/core.hpp"
#include "stanley/modsets.hpp"

namespace stanley {

enum class TailRule {
    power,    ///< b_k = 3^(k + shift) past the head
    tripling, ///< b_k = b_m * 3^(k - m) past the head, m = last head index
};

/// Explicit head b_0..b_m followed by a geometric tail.
struct Basis {
    std::vector<value_t> head;
    unsigned shift = 0;
    TailRule tail = TailRule::power;

    value_t at(std::size_t k) const
    {
        if (k < head.size())
            return head[k];
        if (tail == TailRule::power)
            return arith::pow3(static_cast<unsigned>(k) + shift);
        if (head.empty())
            throw invalid_input("a tripling tail needs a nonempty head");
        return arith::checked_mul(head.back(), arith::pow3(static_cast<unsigned>(k - head.size() + 1)));
    }

    /// Smallest n with b_{k+1} = 3 b_k for every k >= n.
    std::size_t geometric_from() const
    {
        std::size_t n = tail == TailRule::power ? head.size() : head.size() - 1;
        if (tail == TailRule::tripling && head.empty())
            throw invalid_input("a tripling tail needs a nonempty head");
        while (n > 0 && at(n) % 3 == 0 && at(n - 1) == at(n) / 3)
            --n;
        return n;
    }
};

struct BasisReport {
    bool valid = true;
    std::optional<std::size_t> index;
    std::string reason;
};

/// Sufficient conditions for a basic sequence: 3^(k+shift) exactly divides
/// b_k for every k, and b_k = 3^(k+shift) eventually.
inline BasisReport verify_basis(const Basis& b)
{
    for (std::size_t k = 0; k < b.head.size(); ++k) {
        if (b.head[k] == 0)
            return {false, k, "b_" + std::to_string(k) + " is zero"};
        const unsigned want = static_cast<unsigned>(k) + b.shift;
        const unsigned got = arith::v3(b.head[k]);
        if (got != want)
            return {false, k,
                    "3-adic valuation of b_" + std::to_string(k) + " = " + std::to_string(b.head[k]) + " is "
                        + std::to_string(got) + ", expected " + std::to_string(want)};
    }
    if (b.tail == TailRule::tripling) {
        if (b.head.empty())
            return {false, 0, "a tripling tail needs a nonempty head"};
        const std::size_t m = b.head.size() - 1;
        if (b.head[m] != arith::pow3(static_cast<unsigned>(m) + b.shift))
            return {false, m + 1, "tail is not eventually 3^(k+shift)"};
    }
    return {};
}

/// Sorted subset sums of `b`, built layer by layer with a merge.
/// Throws verification_error if two subsets share a sum.
inline std::vector<value_t> subset_sums(std::span<const value_t> b)
{
    if (b.size() > 40)
        throw resource_error("subset_sums: too many generators (" + std::to_string(b.size()) + ")");
    std::vector<value_t> layer{0};
    std::vector<value_t> shifted;
    std::vector<value_t> merged;
    for (value_t x : b) {
        shifted.resize(layer.size());
        for (std::size_t i = 0; i < layer.size(); ++i)
            shifted[i] = arith::checked_add(layer[i], x);
        merged.resize(layer.size() * 2);
        std::merge(layer.begin(), layer.end(), shifted.begin(), shifted.end(), merged.begin());
        if (std::adjacent_find(merged.begin(), merged.end()) != merged.end())
            throw verification_error("subset sums are not distinct");
        layer.swap(merged);
    }
    return layer;
}

/// Sorted {l + block * s : l in low, s in S(0)} up to `bound`; low must lie in [0, block).
inline std::vector<value_t> expand_blocks(std::span<const value_t> low, value_t block, Bound bound)
{
    std::vector<value_t> out;
    for (std::uint64_t m = 0;; ++m) {
        const value_t base = arith::checked_mul(block, arith::binary_as_ternary(m));
        for (value_t x : low) {
            const value_t v = arith::checked_add(base, x);
            if (!bound.admits(out.size(), v))
                return out;
            out.push_back(v);
        }
    }
}

/// First n >= geometric_from() with b_n > offset + sum_{k<n} b_k.
inline std::size_t block_start(const Basis& b, value_t offset = 0)
{
    const std::size_t from = b.geometric_from();
    value_t prefix = 0;
    for (std::size_t k = 0; k < from; ++k)
        prefix = arith::checked_add(prefix, b.at(k));
    for (std::size_t n = from; n < 64; ++n) {
        if (b.at(n) > arith::checked_add(offset, prefix))
            return n;
        prefix = arith::checked_add(prefix, b.at(n));
    }
    throw resource_error("basis tail never dominates its prefix sums within 64 terms");
}

namespace detail {

inline std::vector<value_t> head_values(const Basis& b, std::size_t n)
{
    std::vector<value_t> v(n);
    for (std::size_t k = 0; k < n; ++k)
        v[k] = b.at(k);
    return v;
}

inline void require_positive(const Basis& b)
{
    for (std::size_t k = 0; k < b.head.size(); ++k)
        if (b.head[k] == 0)
            throw invalid_input("basis entry b_" + std::to_string(k) + " is zero");
}

} // namespace detail

/// Subset sums of b_0..b_{n0-1}, n0 = block_start(b): the expansion's
/// values below b_{n0}. For a valid basis this set is modular mod b_{n0} and
/// seeds the greedy generation of the whole expansion.
inline std::vector<value_t> generating_seed(const Basis& b)
{
    detail::require_positive(b);
    return subset_sums(detail::head_values(b, block_start(b)));
}

/// Sorted finite subset sums of `b` up to `bound`. Does not require the
/// basis to pass verify_basis, only positive entries and distinct sums.
inline std::vector<value_t> expand_basis(const Basis& b, Bound bound)
{
    detail::require_positive(b);
    const std::size_t n0 = block_start(b);
    const auto low = subset_sums(detail::head_values(b, n0));
    return expand_blocks(low, b.at(n0), bound);
}

/// A near-modular set mod 3^ell with 2^ell elements, composed with a basis
/// whose entries satisfy v3(b_k) = k + ell and b_k = 3^(k+ell) eventually.
/// n0 is the first index >= 1 from which b_n = 3^(n+ell) and
/// b_n > max A + sum_{k<n} b_k.
class ComposedSystem {
public:
    static ComposedSystem make(std::vector<value_t> set, unsigned ell, Basis basis)
    {
        if (ell < 1)
            throw invalid_input("composed system: ell must be at least 1");
        if (ell > 30)
            throw invalid_input("composed system: ell too large");
        std::sort(set.begin(), set.end());
        if (set.size() != (std::size_t{1} << ell))
            throw invalid_input("composed system: set has " + std::to_string(set.size()) + " elements, expected 2^"
                                + std::to_string(ell) + " = " + std::to_string(std::size_t{1} << ell));
        const value_t mod = arith::pow3(ell);
        const auto rep = verify_near_modular(set, mod);
        if (!rep.ok())
            throw invalid_input("composed system: set is not near-modular mod " + std::to_string(mod) + ": "
                                + describe(*rep.violation));
        if (basis.shift != ell)
            throw invalid_input("composed system: basis shift " + std::to_string(basis.shift)
                                + " differs from ell = " + std::to_string(ell));
        if (basis.tail != TailRule::power)
            throw invalid_input("composed system: basis tail must be 3^(k+ell)");
        const auto brep = verify_basis(basis);
        if (!brep.valid)
            throw invalid_input("composed system: " + brep.reason);
        ComposedSystem sys(std::move(set), ell, std::move(basis));
        sys.n0_ = std::max<std::size_t>(1, block_start(sys.basis_, sys.set_.back()));
        return sys;
    }

    const std::vector<value_t>& set() const { return set_; }
    unsigned ell() const { return ell_; }
    const Basis& basis() const { return basis_; }
    std::size_t n0() const { return n0_; }
    value_t set_modulus() const { return arith::pow3(ell_); }
    value_t block_modulus() const { return basis_.at(n0_); }

    /// {a + sum_{k<n0} delta_k b_k}, sorted; all below block_modulus().
    std::vector<value_t> low_block() const
    {
        const auto sums = subset_sums(detail::head_values(basis_, n0_));
        std::vector<value_t> out;
        out.reserve(set_.size() * sums.size());
        for (value_t a : set_)
            for (value_t s : sums)
                out.push_back(arith::checked_add(a, s));
        std::sort(out.begin(), out.end());
        if (std::adjacent_find(out.begin(), out.end()) != out.end())
            throw verification_error("composed system: two representations share a value");
        return out;
    }

private:
    ComposedSystem(std::vector<value_t> s, unsigned ell, Basis b) : set_(std::move(s)), ell_(ell), basis_(std::move(b)) {}

    std::vector<value_t> set_;
    unsigned ell_;
    Basis basis_;
    std::size_t n0_ = 0;
};

/// Sorted {a + sum delta_k b_k} up to `bound`.
inline std::vector<value_t> compose(const ComposedSystem& sys, Bound bound)
{
    return expand_blocks(sys.low_block(), sys.block_modulus(), bound);
}

/// The low block as a set mod 3^(n0+ell), checked exhaustively to be modular.
inline NearModularSet modularize(const ComposedSystem& sys)
{
    NearModularSet l{sys.low_block(), sys.block_modulus()};
    const auto rep = verify_modular(l.elements, l.modulus);
    if (rep.verdict != Verdict::modular)
        throw verification_error("modularize: low block is not modular mod " + std::to_string(l.modulus) + ": "
                                 + (rep.violation ? describe(*rep.violation) : std::string("?")));
    return l;
}

struct Decomposition {
    value_t a = 0;
    std::vector<std::uint8_t> delta; // trailing zeros trimmed

    friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

/// Unique (a, delta) with value = a + sum delta_k b_k. The A-part is fixed by
/// value mod 3^ell, then delta_k by the residue mod 3^(k+ell+1).
inline Decomposition decompose(value_t value, const ComposedSystem& sys)
{
    const auto fail = [&] {
        return invalid_input(std::to_string(value) + " is not an element of the composed sequence");
    };
    const value_t m = sys.set_modulus();
    const auto& set = sys.set();
    auto it = std::find_if(set.begin(), set.end(), [&](value_t a) { return a % m == value % m; });
    if (it == set.end() || *it > value)
        throw fail();
    Decomposition d{*it, {}};
    value_t x = value - *it;
    for (std::size_t k = 0; x != 0; ++k) {
        const unsigned e = static_cast<unsigned>(k) + sys.ell() + 1;
        if (e > 40)
            throw fail();
        const value_t p = arith::pow3(e);
        const value_t bk = sys.basis().at(k);
        if (x % p == 0) {
            d.delta.push_back(0);
            continue;
        }
        if (x < bk || (x - bk) % p != 0)
            throw fail();
        d.delta.push_back(1);
        x -= bk;
    }
    return d;
}

inline value_t recompose(const Decomposition& d, const ComposedSystem& sys)
{
    value_t v = d.a;
    for (std::size_t k = 0; k < d.delta.size(); ++k)
        if (d.delta[k])
            v = arith::checked_add(v, sys.basis().at(k));
    return v;
}

/// Shortest prefix of `sequence` whose greedy extension reproduces its first
/// `check_terms` terms. A prefix that works stays working when lengthened,
/// so the length is found by binary search.
inline std::size_t minimal_generating_prefix(std::span<const value_t> sequence, std::size_t check_terms)
{
    if (check_terms > sequence.size() || check_terms == 0)
        throw invalid_input("minimal_generating_prefix: check_terms must be in 1..sequence length");
    const auto target = sequence.first(check_terms);
    auto works = [&](std::size_t p) {
        try {
            const auto g = generate(std::vector<value_t>(sequence.begin(), sequence.begin() + static_cast<std::ptrdiff_t>(p)),
                                    Bound::terms(check_terms));
            return std::equal(g.terms.begin(), g.terms.end(), target.begin(), target.end());
        } catch (const invalid_seed&) {
            return false;
        }
    };
    std::size_t lo = 1;
    std::size_t hi = check_terms;
    if (!works(hi))
        throw verification_error("sequence is not the greedy extension of any of its prefixes");
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (works(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

} // namespace stanley
