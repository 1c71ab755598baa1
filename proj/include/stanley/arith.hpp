#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "stanley/errors.hpp"

namespace stanley::arith {

inline constexpr std::uint64_t max_value = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b)
{
    if (a > max_value - b)
        throw resource_error("64-bit overflow in addition");
    return a + b;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b)
{
    if (a != 0 && b > max_value / a)
        throw resource_error("64-bit overflow in multiplication");
    return a * b;
}

/// 3^e, throwing on overflow (3^40 is the largest power that fits).
inline std::uint64_t pow3(unsigned e)
{
    std::uint64_t r = 1;
    for (unsigned i = 0; i < e; ++i)
        r = checked_mul(r, 3);
    return r;
}

/// 3-adic valuation; v3(0) is reported as a large sentinel.
constexpr unsigned v3(std::uint64_t x)
{
    if (x == 0)
        return 64;
    unsigned v = 0;
    while (x % 3 == 0) {
        x /= 3;
        ++v;
    }
    return v;
}

/// Value of the binary digits of `m` read in base 3, i.e. the m-th element
/// of S(0).
inline std::uint64_t binary_as_ternary(std::uint64_t m)
{
    std::uint64_t r = 0;
    std::uint64_t p = 1;
    while (m != 0) {
        if (m & 1)
            r = checked_add(r, p);
        m >>= 1;
        if (m != 0)
            p = checked_mul(p, 3);
    }
    return r;
}

/// Exact log2 for powers of two, otherwise floor(log2(x)).
constexpr unsigned floor_log2(std::uint64_t x)
{
    unsigned r = 0;
    while (x > 1) {
        x >>= 1;
        ++r;
    }
    return r;
}

} // namespace stanley::arith
