#pragma once

#include "besovlab/types.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace besovlab {

/// Least-squares slope of log(y) against log(x). Requires equal sizes,
/// >= 2 points, positive data.
inline double fit_loglog_slope(const std::vector<double>& x,
                               const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ValidationError("fit_loglog_slope: need >= 2 paired points");
    }
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw ValidationError("fit_loglog_slope: data must be positive");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    if (den == 0.0) {
        throw ValidationError("fit_loglog_slope: degenerate abscissae");
    }
    return num / den;
}

}  // namespace besovlab
