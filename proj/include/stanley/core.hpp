#pragma once

// Greedy generation of 3-AP-free (Stanley) sequences.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stanley/arith.hpp"
#include "stanley/errors.hpp"

namespace stanley {

using value_t = std::uint64_t;

/// Three members x <= y <= z of a set with x + z = 2y.
struct ApWitness {
    value_t x = 0;
    value_t y = 0;
    value_t z = 0;

    bool nontrivial() const { return !(x == y && y == z); }
    friend bool operator==(const ApWitness&, const ApWitness&) = default;
};

inline std::string to_string(const ApWitness& w)
{
    return "(" + std::to_string(w.x) + "," + std::to_string(w.y) + "," + std::to_string(w.z) + ")";
}

/// Either a term-count limit or an inclusive value limit.
class Bound {
public:
    enum class Kind { count, value };

    static Bound terms(std::uint64_t n) { return Bound(Kind::count, n); }
    static Bound up_to(value_t v) { return Bound(Kind::value, v); }

    Kind kind() const { return kind_; }
    std::uint64_t limit() const { return limit_; }
    bool is_count() const { return kind_ == Kind::count; }

    /// Whether a term with zero-based position `index` and value `v` is inside the bound.
    bool admits(std::uint64_t index, value_t v) const
    {
        return kind_ == Kind::count ? index < limit_ : v <= limit_;
    }

private:
    Bound(Kind k, std::uint64_t l) : kind_(k), limit_(l) {}

    Kind kind_;
    std::uint64_t limit_;
};

/// Growable bit table addressed by value.
class BitTable {
public:
    BitTable() = default;
    explicit BitTable(std::uint64_t bits) { resize(bits); }

    std::uint64_t size() const { return bits_; }

    void resize(std::uint64_t bits)
    {
        words_.resize((bits + 63) / 64, 0);
        bits_ = bits;
    }

    bool test(std::uint64_t i) const { return i < bits_ && ((words_[i >> 6] >> (i & 63)) & 1u); }
    void set(std::uint64_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }

    /// First clear position at or after `from`. Positions past the end count as clear.
    std::uint64_t first_clear(std::uint64_t from) const
    {
        if (from >= bits_)
            return from;
        std::uint64_t w = from >> 6;
        std::uint64_t word = words_[w] | ((std::uint64_t{1} << (from & 63)) - 1);
        while (true) {
            if (word != ~std::uint64_t{0}) {
                std::uint64_t pos = (w << 6) + static_cast<std::uint64_t>(std::countr_one(word));
                return std::min(pos, bits_);
            }
            if (++w >= words_.size())
                return bits_;
            word = words_[w];
        }
    }

private:
    std::vector<std::uint64_t> words_;
    std::uint64_t bits_ = 0;
};

/// Nontrivial AP x < y < z inside `elements`, lexicographically smallest in (x, y).
/// Input need not be sorted; duplicates are ignored.
inline std::optional<ApWitness> has_3ap(std::span<const value_t> elements)
{
    std::vector<value_t> s(elements.begin(), elements.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const value_t x = s[i];
            const value_t y = s[j];
            if (y - x > arith::max_value - y)
                break;
            const value_t z = y + (y - x);
            if (std::binary_search(s.begin() + static_cast<std::ptrdiff_t>(j) + 1, s.end(), z))
                return ApWitness{x, y, z};
        }
    }
    return std::nullopt;
}

/// A seed rejected by generate(); carries the offending progression when there is one.
class invalid_seed : public invalid_input {
public:
    invalid_seed(const std::string& what, std::optional<ApWitness> w)
        : invalid_input(what), witness_(w)
    {
    }

    const std::optional<ApWitness>& witness() const { return witness_; }

private:
    std::optional<ApWitness> witness_;
};

/// Finite strictly increasing 3-AP-free set containing 0.
class SeedSet {
public:
    /// Validates and sorts. Throws invalid_seed.
    static SeedSet make(std::vector<value_t> elements)
    {
        if (elements.empty())
            throw invalid_seed("seed is empty", std::nullopt);
        std::sort(elements.begin(), elements.end());
        if (std::adjacent_find(elements.begin(), elements.end()) != elements.end())
            throw invalid_seed("seed contains duplicate elements", std::nullopt);
        if (elements.front() != 0)
            throw invalid_seed("seed must contain 0", std::nullopt);
        if (auto w = has_3ap(elements))
            throw invalid_seed("seed contains the arithmetic progression " + to_string(*w), w);
        return SeedSet(std::move(elements));
    }

    const std::vector<value_t>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }

private:
    explicit SeedSet(std::vector<value_t> e) : elements_(std::move(e)) {}

    std::vector<value_t> elements_;
};

/// Chosen terms plus a bit-addressable membership table, for incremental
/// admissibility queries.
class MembershipTable {
public:
    MembershipTable() = default;

    explicit MembershipTable(std::span<const value_t> chosen)
    {
        for (value_t v : chosen)
            insert(v);
    }

    void insert(value_t v)
    {
        if (v >= table_.size())
            table_.resize(std::max<std::uint64_t>(v + 1, table_.size() * 2));
        if (!table_.test(v)) {
            table_.set(v);
            members_.push_back(v);
            max_ = std::max(max_, v);
        }
    }

    bool contains(value_t v) const { return table_.test(v); }
    std::span<const value_t> members() const { return members_; }
    value_t max() const { return max_; }
    bool empty() const { return members_.empty(); }

    /// True iff `candidate` closes no progression as the largest term.
    /// Requires candidate > max().
    bool is_admissible(value_t candidate) const
    {
        if (!members_.empty() && candidate <= max_)
            throw invalid_input("is_admissible: candidate " + std::to_string(candidate)
                                + " does not exceed the chosen maximum " + std::to_string(max_));
        for (value_t y : members_) {
            if (y > arith::max_value / 2)
                throw resource_error("64-bit overflow in admissibility check");
            const value_t twice = 2 * y;
            if (twice >= candidate && contains(twice - candidate))
                return false;
        }
        return true;
    }

private:
    BitTable table_;
    std::vector<value_t> members_;
    value_t max_ = 0;
};

inline bool is_admissible(std::span<const value_t> chosen, value_t candidate)
{
    return MembershipTable(chosen).is_admissible(candidate);
}

struct GreedySequence {
    SeedSet seed;
    std::vector<value_t> terms;
};

struct GenerateOptions {
    /// Upper limit on the sieve table, in bits (default 2^34 bits = 2 GiB).
    std::uint64_t max_table_bits = std::uint64_t{1} << 34;
};

/// Greedy extension of `seed` up to `bound`.
///
/// A bit table of forbidden values is kept: whenever t is appended, 2t - x is
/// marked for every earlier term x. The next term is the first unmarked value
/// above the current maximum. The table always covers [0, 2 max + 1), capped
/// at the value bound, and grows by doubling.
inline GreedySequence generate(const SeedSet& seed, Bound bound, GenerateOptions opts = {})
{
    GreedySequence out{seed, {}};
    auto& terms = out.terms;
    const auto& s = seed.elements();

    for (std::size_t i = 0; i < s.size() && bound.admits(i, s[i]); ++i)
        terms.push_back(s[i]);
    if (terms.size() < s.size())
        return out;

    const bool value_bounded = !bound.is_count();
    const std::uint64_t value_cap = value_bounded ? bound.limit() : arith::max_value;

    BitTable forbidden;
    auto ensure_cover = [&](value_t top) {
        // table must reach min(2*top, value_cap) inclusive
        if (top > arith::max_value / 2)
            throw resource_error("64-bit overflow: term " + std::to_string(top) + " too large to sieve");
        std::uint64_t need = 2 * top;
        if (value_bounded)
            need = std::min(need, value_cap);
        if (need == arith::max_value)
            throw resource_error("64-bit overflow: sieve table would exceed the integer range");
        need += 1;
        if (need <= forbidden.size())
            return;
        std::uint64_t grown = std::max<std::uint64_t>(forbidden.size(), 64);
        while (grown < need)
            grown = grown > arith::max_value / 2 ? need : grown * 2;
        if (value_bounded)
            grown = std::min(grown, value_cap + 1);
        grown = std::max(grown, need);
        if (grown > opts.max_table_bits) {
            if (need > opts.max_table_bits)
                throw resource_error("sieve table of " + std::to_string(need) + " bits exceeds the limit of "
                                     + std::to_string(opts.max_table_bits));
            grown = opts.max_table_bits;
        }
        forbidden.resize(grown);
    };

    auto mark_from = [&](std::size_t idx) {
        const value_t t = terms[idx];
        ensure_cover(t);
        for (std::size_t k = idx; k-- > 0;) {
            const value_t m = 2 * t - terms[k];
            if (m > value_cap)
                break;
            forbidden.set(m);
        }
    };

    for (std::size_t i = 1; i < terms.size(); ++i)
        mark_from(i);
    if (terms.size() == 1)
        ensure_cover(terms[0]);

    while (true) {
        if (bound.is_count() && terms.size() >= bound.limit())
            break;
        const value_t last = terms.back();
        if (last == arith::max_value)
            throw resource_error("64-bit overflow: no successor for " + std::to_string(last));
        const value_t next = forbidden.first_clear(last + 1);
        if (!bound.admits(terms.size(), next))
            break;
        terms.push_back(next);
        mark_from(terms.size() - 1);
    }
    return out;
}

inline GreedySequence generate(std::vector<value_t> seed, Bound bound, GenerateOptions opts = {})
{
    return generate(SeedSet::make(std::move(seed)), bound, opts);
}

} // namespace stanley
