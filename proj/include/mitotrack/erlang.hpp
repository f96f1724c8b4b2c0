#pragma once

#include <cmath>

#include "mitotrack/common.hpp"

namespace mitotrack {

/// Cumulative distribution of an Erlang(alpha, rate) variable,
/// P[T <= t] = 1 - sum_{n=0}^{alpha-1} exp(-rate t) (rate t)^n / n!.
inline double erlang_cdf(double t, int alpha, double rate) {
    if (!std::isfinite(t)) throw DomainError("erlang_cdf: non-finite t");
    if (t < 0.0) throw DomainError("erlang_cdf: negative t");
    if (alpha < 1) throw DomainError("erlang_cdf: alpha must be >= 1");
    if (!(rate > 0.0)) throw DomainError("erlang_cdf: rate must be > 0");

    const double x = rate * t;
    double term = std::exp(-x);  // n = 0
    double sum = term;
    for (int n = 1; n < alpha; ++n) {
        term *= x / static_cast<double>(n);
        sum += term;
    }
    double cdf = 1.0 - sum;
    if (cdf < 0.0) cdf = 0.0;
    if (cdf > 1.0) cdf = 1.0;
    return cdf;
}

}  // namespace mitotrack
