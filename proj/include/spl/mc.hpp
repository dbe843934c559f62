#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "spl/common.hpp"

namespace spl {

namespace detail {

/// Compensated (Kahan) sum in index order: deterministic for any worker
/// count as long as the per-index values are.
inline double compensated_sum(std::span<const double> values) {
    double sum = 0.0, c = 0.0;
    for (double v : values) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

/// Inverse standard normal CDF (Acklam's rational approximation, refined by
/// one Halley step; ~1e-15 absolute accuracy).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError("normal_quantile: p must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5, t = q * q;
        x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * q /
            (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

}  // namespace detail

/// Mean / stderr / replication count / CI of a Monte Carlo quantity.
struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
    double ci_level = 0.95;
    double lo = 0.0;
    double hi = 0.0;

    static MCEstimate from_samples(std::span<const double> samples, double ci_level = 0.95) {
        if (samples.size() < 2) throw ArgumentError("MCEstimate: need n >= 2 samples");
        MCEstimate out;
        out.n = samples.size();
        out.ci_level = ci_level;
        out.mean = detail::compensated_sum(samples) / static_cast<double>(out.n);
        std::vector<double> sq(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double dev = samples[i] - out.mean;
            sq[i] = dev * dev;
        }
        const double var =
            detail::compensated_sum(sq) / static_cast<double>(out.n - 1);
        out.stderr_ = std::sqrt(var / static_cast<double>(out.n));
        const double z = detail::normal_quantile(0.5 + ci_level / 2.0);
        out.lo = out.mean - z * out.stderr_;
        out.hi = out.mean + z * out.stderr_;
        return out;
    }

    /// Exact (zero-variance) value, for the sigma = 0 short-circuit.
    static MCEstimate exact(double value, std::size_t n, double ci_level = 0.95) {
        return MCEstimate{value, 0.0, n, ci_level, value, value};
    }
};

}  // namespace spl
