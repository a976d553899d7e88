#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "piwb/policy_iteration.hpp"
#include "piwb/rational.hpp"
#include "piwb/sequence_checks.hpp"

namespace piwb {

/// 13 k^n / n, exact.
inline Rational mansour_singh_bound(int n, int k) {
    if (n < 1 || k < 2) throw std::invalid_argument("mansour_singh_bound: need n >= 1 and k >= 2");
    BigInt kn;
    mpz_ui_pow_ui(kn.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(n));
    Rational q(kn * 13, n);
    q.canonicalize();
    return q;
}

/// The simplified binomial tail with f(n) = sqrt(n ln n): exactly 1/n^2.
inline Rational hoeffding_tail(int n) {
    if (n < 2) throw std::invalid_argument("hoeffding_tail: requires n >= 2");
    return Rational(1, BigInt(static_cast<long>(n)) * n);
}

/**
 * Finite-n evaluation of the improved iteration bound:
 *   k^n/n^2  +  k^n / ((k-1)/k * n - sqrt(n ln n)),
 * capped by the trivial bound k^n. fallback_used marks the cap engaging,
 * either because the large-set denominator is nonpositive or because the
 * expression exceeds k^n. Natural logarithm throughout (forced by the
 * tail identity behind the 1/n^2 term).
 */
struct BoundBreakdown {
    int n = 0;
    int k = 0;
    long double f_n = 0;
    long double small_set_count_bound = 0;
    long double large_set_count_bound = 0;
    long double total_bound = 0;
    bool fallback_used = false;
};

inline BoundBreakdown improved_bound(int n, int k) {
    if (n < 1 || k < 2) throw std::invalid_argument("improved_bound: need n >= 1 and k >= 2");
    BoundBreakdown b;
    b.n = n;
    b.k = k;
    const long double kn = powl(static_cast<long double>(k), static_cast<long double>(n));
    b.f_n = sqrtl(static_cast<long double>(n) * logl(static_cast<long double>(n)));
    b.small_set_count_bound = kn / (static_cast<long double>(n) * n);
    const long double denom = static_cast<long double>(k - 1) / k * n - b.f_n;
    if (denom <= 0) {
        b.large_set_count_bound = kn;  // the trivial cap is the operative bound
        b.total_bound = kn;
        b.fallback_used = true;
        return b;
    }
    b.large_set_count_bound = kn / denom;
    const long double total = b.small_set_count_bound + b.large_set_count_bound;
    if (total > kn) {
        b.total_bound = kn;
        b.fallback_used = true;
    } else {
        b.total_bound = total;
    }
    return b;
}

/**
 * Checks a trace length against every applicable iteration bound. The two
 * exact bounds (Mansour-Singh and the trivial cap k^n) are compared in
 * integer arithmetic; the improved bound is compared after rounding up,
 * conservatively for integer lengths.
 */
inline ViolationReport validate_trace_bounds(const PiTrace& trace) {
    ViolationReport report;
    const int n = trace.n, k = trace.k;
    if (n < 1 || k < 2) {
        report.add({}, "trace-header", "trace header must carry n >= 1 and k >= 2");
        return report;
    }
    const BigInt length(static_cast<unsigned long>(trace.length()));
    BigInt kn;
    mpz_ui_pow_ui(kn.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(n));

    if (length > kn) {
        std::ostringstream os;
        os << "trace length " << length.get_str() << " exceeds the trivial cap k^n = " << kn.get_str();
        report.add({}, "trivial-cap", os.str());
    }
    if (length * n > kn * 13) {
        std::ostringstream os;
        os << "trace length " << length.get_str() << " exceeds 13 k^n / n = " << format_rational(mansour_singh_bound(n, k));
        report.add({}, "mansour-singh", os.str());
    }
    const BoundBreakdown b = improved_bound(n, k);
    const long double rounded_up = ceill(nextafterl(b.total_bound, std::numeric_limits<long double>::infinity()));
    if (static_cast<long double>(trace.length()) > rounded_up) {
        std::ostringstream os;
        os << "trace length " << trace.length() << " exceeds the improved bound " << static_cast<double>(b.total_bound);
        report.add({}, "improved-bound", os.str());
    }
    return report;
}

}  // namespace piwb
