#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "hopsi/errors.hpp"

namespace hopsi {

/// Standard Normal CDF.
template <typename Scalar>
Scalar normal_cdf(Scalar z) {
    return Scalar(0.5) * std::erfc(-z / std::numbers::sqrt2_v<Scalar>);
}

/// Standard Normal upper tail 1 - Phi(z), accurate far into the tail.
template <typename Scalar>
Scalar normal_sf(Scalar z) {
    return Scalar(0.5) * std::erfc(z / std::numbers::sqrt2_v<Scalar>);
}

/// log of the Mills ratio (1 - Phi(t)) / phi(t) for t >= 0.
template <typename Scalar>
Scalar log_mills_ratio(Scalar t) {
    using std::exp;
    using std::log;
    if (t < Scalar(8)) {
        const Scalar pdf = exp(-t * t / 2) / std::sqrt(2 * std::numbers::pi_v<Scalar>);
        return log(normal_sf(t) / pdf);
    }
    // 1 / (t + 1 / (t + 2 / (t + 3 / ...))), evaluated from the tail up
    Scalar frac = t;
    for (int i = 120; i >= 1; --i) frac = t + Scalar(i) / frac;
    return -log(frac);
}

namespace detail {

// log[(1 - Phi(t)) / (1 - Phi(lo))] for t >= lo >= 0; never underflows.
template <typename Scalar>
Scalar log_tail_ratio(Scalar t, Scalar lo) {
    if (t == std::numeric_limits<Scalar>::infinity()) return -std::numeric_limits<Scalar>::infinity();
    return -(t - lo) * (t + lo) / 2 + log_mills_ratio(t) - log_mills_ratio(lo);
}

// P(X <= a) for X ~ N(0,1) restricted to [lo, hi] with 0 <= lo < a < hi.
template <typename Scalar>
Scalar upper_window_cdf(Scalar a, Scalar lo, Scalar hi) {
    const Scalar num = -std::expm1(log_tail_ratio(a, lo));
    const Scalar den = -std::expm1(log_tail_ratio(hi, lo));
    return num / den;
}

// P(X >= u) for X ~ N(0,1) restricted to [lo, hi] with 0 <= lo < u < hi.
template <typename Scalar>
Scalar upper_window_sf(Scalar u, Scalar lo, Scalar hi) {
    const Scalar ru = log_tail_ratio(u, lo);
    const Scalar rh = log_tail_ratio(hi, lo);
    const Scalar num = std::exp(ru) * -std::expm1(rh - ru);
    return num / -std::expm1(rh);
}

}  // namespace detail

/// CDF at x of N(mean, variance) truncated to [v, w]; v or w may be
/// infinite. Windows lying entirely on one side of the mean are evaluated
/// through tail ratios in log space so that windows many standard
/// deviations out keep full relative accuracy.
template <typename Scalar>
Scalar trunc_norm_cdf(Scalar x, Scalar mean, Scalar variance, Scalar v, Scalar w) {
    if (!(variance > 0)) throw UsageError("truncated Normal variance must be positive");
    if (!(v < w)) throw UsageError("truncation window must satisfy v < w");
    if (x <= v) return Scalar(0);
    if (x >= w) return Scalar(1);
    const Scalar s = std::sqrt(variance);
    const Scalar a = (x - mean) / s;
    const Scalar lo = (v - mean) / s;
    const Scalar hi = (w - mean) / s;

    Scalar f;
    if (lo >= 0) {
        f = detail::upper_window_cdf(a, lo, hi);
    } else if (hi <= 0) {
        f = detail::upper_window_sf(-a, -hi, -lo);
    } else {
        // window straddles the mean: erf differences add without cancelling
        const Scalar r2 = std::numbers::sqrt2_v<Scalar>;
        const Scalar den = std::erf(hi / r2) + std::erf(-lo / r2);
        const Scalar num = a >= 0 ? std::erf(a / r2) + std::erf(-lo / r2)
                                  : std::erfc(-a / r2) - std::erfc(-lo / r2);
        f = num / den;
    }
    if (!(f >= 0)) return Scalar(0);
    if (f > 1) return Scalar(1);
    return f;
}

/// 1 - trunc_norm_cdf, computed by reflection so that it keeps relative
/// accuracy when the CDF is close to one.
template <typename Scalar>
Scalar trunc_norm_sf(Scalar x, Scalar mean, Scalar variance, Scalar v, Scalar w) {
    return trunc_norm_cdf(-x, -mean, variance, -w, -v);
}

}  // namespace hopsi
