#pragma once

// Independence certificates (character, chi, repeat factor) and growth statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stanley/core.hpp"

namespace stanley {

/// Both block identities
///   a_{2^k + i} = a_{2^k} + a_i        (0 <= i < 2^k)
///   a_{2^k}     = 2 a_{2^k - 1} - character + 1
/// hold for every chi <= k <= verified_depth, and chi is minimal.
struct IndependenceCertificate {
    std::int64_t character = 0;
    unsigned chi = 0;
    value_t repeat_factor = 0;
    unsigned verified_depth = 0;

    friend bool operator==(const IndependenceCertificate&, const IndependenceCertificate&) = default;
};

/// First failure at the top checked level. `index` is set when the
/// translation identity failed at a_{2^k + index}; unset means the doubling
/// identity failed.
struct IndependenceViolation {
    unsigned k = 0;
    std::optional<std::uint64_t> index;
    std::int64_t expected = 0;
    std::int64_t actual = 0;
};

struct IndependenceReport {
    std::optional<IndependenceCertificate> certificate;
    std::optional<IndependenceViolation> violation;

    bool independent() const { return certificate.has_value(); }
};

namespace detail {

inline std::int64_t as_signed(value_t v)
{
    if (v > static_cast<value_t>(std::numeric_limits<std::int64_t>::max()))
        throw resource_error("term " + std::to_string(v) + " exceeds the signed 64-bit range");
    return static_cast<std::int64_t>(v);
}

inline void require_terms(std::span<const value_t> terms, std::uint64_t needed, const char* what)
{
    if (terms.size() < needed)
        throw invalid_input(std::string(what) + ": need " + std::to_string(needed) + " terms, have "
                            + std::to_string(terms.size()));
}

/// Checks both identities at level k against `character`; nullopt on success.
inline std::optional<IndependenceViolation> check_level(std::span<const value_t> a, unsigned k,
                                                        std::int64_t character)
{
    const std::uint64_t p = std::uint64_t{1} << k;
    const std::int64_t head = as_signed(a[p]);
    const std::int64_t doubled = 2 * as_signed(a[p - 1]) - character + 1;
    if (head != doubled)
        return IndependenceViolation{k, std::nullopt, doubled, head};
    for (std::uint64_t i = 0; i < p; ++i) {
        const std::int64_t expected = head + as_signed(a[i]);
        const std::int64_t actual = as_signed(a[p + i]);
        if (expected != actual)
            return IndependenceViolation{k, i, expected, actual};
    }
    return std::nullopt;
}

} // namespace detail

/// 2 a_{2^k - 1} - a_{2^k} + 1. Negative values are possible below chi.
inline std::int64_t character_at(std::span<const value_t> terms, unsigned k)
{
    if (k > 62)
        throw invalid_input("character_at: level too large");
    const std::uint64_t p = std::uint64_t{1} << k;
    detail::require_terms(terms, p + 1, "character_at");
    return 2 * detail::as_signed(terms[p - 1]) - detail::as_signed(terms[p]) + 1;
}

/// Checks the block identities for k = max_depth, max_depth - 1, ... and
/// returns the certificate with minimal chi, or the violation at max_depth.
///
/// The character is read off at k = max_depth and every lower level accepted
/// into the certificate must agree with it. Needs 2^(max_depth + 1) terms.
inline IndependenceReport analyze_independence(std::span<const value_t> terms, unsigned max_depth)
{
    if (max_depth < 1)
        throw invalid_input("analyze_independence: max_depth must be at least 1");
    if (max_depth > 40)
        throw invalid_input("analyze_independence: max_depth too large");
    detail::require_terms(terms, std::uint64_t{1} << (max_depth + 1), "analyze_independence");

    const std::int64_t character = character_at(terms, max_depth);
    if (auto v = detail::check_level(terms, max_depth, character))
        return {std::nullopt, v};

    unsigned chi = max_depth;
    while (chi > 0 && !detail::check_level(terms, chi - 1, character))
        --chi;
    return {IndependenceCertificate{character, chi, terms[std::size_t{1} << chi], max_depth}, std::nullopt};
}

inline IndependenceReport analyze_independence(const GreedySequence& seq, unsigned max_depth)
{
    return analyze_independence(std::span<const value_t>(seq.terms), max_depth);
}

/// Re-evaluates a certificate from scratch against `terms`.
inline bool recheck_certificate(std::span<const value_t> terms, const IndependenceCertificate& cert)
{
    if (terms.size() < (std::uint64_t{1} << (cert.verified_depth + 1)))
        return false;
    for (unsigned k = cert.chi; k <= cert.verified_depth; ++k)
        if (detail::check_level(terms, k, cert.character))
            return false;
    if (cert.chi > 0 && !detail::check_level(terms, cert.chi - 1, cert.character))
        return false;
    return terms[std::size_t{1} << cert.chi] == cert.repeat_factor;
}

struct GrowthSample {
    std::uint64_t n = 0;
    value_t value = 0;
    double ratio = 0;
    double running_min = 0;
    double running_max = 0;
};

/// Descriptive statistics of a_n / n^(log2 3). No classification is implied.
struct GrowthReport {
    std::uint64_t spacing = 1;
    std::vector<GrowthSample> samples;       // n = s, 2s, ... < len
    std::vector<GrowthSample> power_samples; // n = 2^k - 1 and 2^k, k >= 1
    double alpha_estimate = 0;               // max ratio over the upper half of the samples
    double liminf_estimate = 0;              // min ratio over the same window
};

inline double growth_ratio(std::uint64_t n, value_t v)
{
    return static_cast<double>(v) / std::pow(static_cast<double>(n), std::log2(3.0));
}

inline GrowthReport growth_stats(std::span<const value_t> terms, std::uint64_t spacing)
{
    if (terms.empty())
        throw invalid_input("growth_stats: empty sequence");
    if (spacing < 1)
        throw invalid_input("growth_stats: spacing must be at least 1");

    GrowthReport r;
    r.spacing = spacing;
    const std::uint64_t len = terms.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0;
    for (std::uint64_t n = spacing; n < len; n += spacing) {
        const double q = growth_ratio(n, terms[n]);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
        r.samples.push_back({n, terms[n], q, lo, hi});
    }
    double wlo = std::numeric_limits<double>::infinity();
    double whi = 0;
    for (const auto& s : r.samples) {
        if (2 * s.n >= len) {
            wlo = std::min(wlo, s.ratio);
            whi = std::max(whi, s.ratio);
        }
    }
    if (whi > 0) {
        r.alpha_estimate = whi;
        r.liminf_estimate = wlo;
    }

    lo = std::numeric_limits<double>::infinity();
    hi = 0;
    for (std::uint64_t p = 2; p - 1 < len; p *= 2) {
        for (std::uint64_t n : {p - 1, p}) {
            if (n >= len)
                break;
            const double q = growth_ratio(n, terms[n]);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
            r.power_samples.push_back({n, terms[n], q, lo, hi});
        }
        if (p > (std::uint64_t{1} << 62))
            break;
    }
    return r;
}

} // namespace stanley
