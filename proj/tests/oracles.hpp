#pragma once

// Independent reference evaluations in extended-precision floating point. Slow,
// brute force, and deliberately free of any code shared with the library.

#include <cmath>
#include <cstddef>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

// The J0 series cancels terms up to ~1e86 at x = 200, hence the wide type; the
// incomplete gamma series has positive terms only.
using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<120>>;
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<40>>;

/// J0 by its Maclaurin series, summed until the terms are negligible.
inline double bessel_j0(double x) {
    const Wide q = Wide(x) * Wide(x) / 4;
    Wide term = 1;
    Wide sum = 1;
    const Wide eps = Wide("1e-110");
    for (int k = 1; k < 5000; ++k) {
        term *= -q / (Wide(k) * Wide(k));
        sum += term;
        if (Wide(k) * k > q && abs(term) < eps) break;
    }
    return static_cast<double>(sum);
}

/// P(a, x) = x^a e^-x / Gamma(a + 1) * sum_k x^k / ((a+1)...(a+k)), for all x >= 0.
inline double reg_lower_incomplete_gamma(double a, double x) {
    if (x == 0.0) return 0.0;
    const Big ba(a), bx(x);
    Big term = 1;
    Big sum = 1;
    const Big eps = Big("1e-35");
    for (int k = 1; k < 100000; ++k) {
        term *= bx / (ba + k);
        sum += term;
        if (ba + k > bx && term < eps * sum) break;
    }
    const Big log_prefix = ba * log(bx) - bx - boost::math::lgamma(ba + 1);
    const Big p = exp(log_prefix) * sum;
    return static_cast<double>(p);
}

/// ln Gamma(x) in extended precision.
inline double ln_gamma(double x) { return static_cast<double>(boost::math::lgamma(Big(x))); }

/// First positive zero of J0, bisected on the series oracle.
inline double bessel_j0_first_zero() {
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bessel_j0(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace oracle
