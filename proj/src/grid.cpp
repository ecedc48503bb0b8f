#include "besovlab/grid.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace besovlab {

// ============================================================================
// Domain
// ============================================================================

Domain Domain::make(double side_length, int resolution) {
    if (!(side_length > 0.0) || !std::isfinite(side_length)) {
        throw ValidationError("Domain: side_length must be positive and finite, got " +
                              std::to_string(side_length));
    }
    // Even N keeps the node set symmetric about the origin.
    if (resolution < 8 || resolution % 2 != 0) {
        throw ValidationError("Domain: resolution must be even and >= 8, got " +
                              std::to_string(resolution));
    }
    Domain d;
    d.side_length = side_length;
    d.resolution = resolution;
    return d;
}

// ============================================================================
// GridFunction
// ============================================================================

void GridFunction::validate_support() const {
    if (!support_radius) return;
    const int n = resolution();
    for (int ix = 0; ix < n; ++ix) {
        for (int iy = 0; iy < n; ++iy) {
            if (values(ix, iy) != 0.0 && domain.node(ix, iy).norm() > *support_radius) {
                std::ostringstream msg;
                msg << "GridFunction: declared support_radius " << *support_radius
                    << " violated at node (" << ix << "," << iy << "), |x| = "
                    << domain.node(ix, iy).norm();
                throw ValidationError(msg.str());
            }
        }
    }
}

GridFunction sample(const AnalyticFn& f, const Domain& domain,
                    std::optional<double> support_radius) {
    const int n = domain.resolution;
    GridFunction g;
    g.domain = domain;
    g.values.resize(n, n);
    for (int ix = 0; ix < n; ++ix) {
        for (int iy = 0; iy < n; ++iy) {
            const double v = f(domain.node(ix, iy));
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "sample: non-finite value at node (" << ix << "," << iy
                    << ") = (" << domain.coord(ix) << "," << domain.coord(iy) << ")";
                throw ValidationError(msg.str());
            }
            g.values(ix, iy) = v;
        }
    }
    g.support_radius = support_radius;
    g.validate_support();
    return g;
}

// ============================================================================
// Kernels
// ============================================================================



static void check_offset(const GridFunction& f, int di, int dj) {
    const int n = f.resolution();
    if (std::abs(di) >= n || std::abs(dj) >= n) {
        throw ValidationError("shift offset (" + std::to_string(di) + "," +
                              std::to_string(dj) + ") out of range for N = " +
                              std::to_string(n));
    }
}

GridFunction shift_difference(const GridFunction& f, int di, int dj) {
    check_offset(f, di, dj);
    const int n = f.resolution();
    GridFunction g;
    g.domain = f.domain;
    g.values = -f.values;
    // Overlap block: indices ix with both x and x + h inside the box.
    const int lo_i = std::max(0, -di), lo_j = std::max(0, -dj);
    const int len_i = n - std::abs(di), len_j = n - std::abs(dj);
    if (len_i > 0 && len_j > 0) {
        g.values.block(lo_i, lo_j, len_i, len_j) +=
            f.values.block(lo_i + di, lo_j + dj, len_i, len_j);
    }
    return g;
}

double shift_abs_pow_sum(const GridFunction& f, int di, int dj, double p) {
    check_offset(f, di, dj);
    const int n = f.resolution();
    const int lo_i = std::max(0, -di), lo_j = std::max(0, -dj);
    const int len_i = n - std::abs(di), len_j = n - std::abs(dj);
    const double w = f.spacing() * f.spacing();
    if (len_i <= 0 || len_j <= 0) {
        return w * detail::abs_pow_sum(f.values, p);
    }
    double s = detail::abs_pow_sum(
        f.values.block(lo_i + di, lo_j + dj, len_i, len_j) -
            f.values.block(lo_i, lo_j, len_i, len_j),
        p);
    // Boundary strips: x + h leaves the box, the difference is -f(x).
    // Complement of the overlap block split into a full-height band and two caps.
    const int ci = (di >= 0) ? len_i : 0;  // strip of rows outside overlap
    if (std::abs(di) > 0) {
        s += detail::abs_pow_sum(f.values.block(ci, 0, std::abs(di), n), p);
    }
    if (std::abs(dj) > 0) {
        const int cj = (dj >= 0) ? len_j : 0;
        s += detail::abs_pow_sum(f.values.block(lo_i, cj, len_i, std::abs(dj)), p);
    }
    return w * s;
}

double lp_norm(const GridFunction& f, double p) {
    if (p == std::numeric_limits<double>::infinity()) {
        return f.values.abs().maxCoeff();
    }
    if (!(p >= 1.0)) {
        throw ValidationError("lp_norm: exponent must satisfy p >= 1, got " +
                              std::to_string(p));
    }
    const double w = f.spacing() * f.spacing();
    return std::pow(w * detail::abs_pow_sum(f.values, p), 1.0 / p);
}

LpQuadrature::LpQuadrature(double p) : exponent(p) {
    if (!(p >= 1.0)) {
        throw ValidationError("LpQuadrature: exponent must satisfy p >= 1");
    }
}

double bilinear_interpolate(const GridFunction& f, const Vec2& x) {
    const int n = f.resolution();
    const double h = f.spacing();
    // Continuous cell coordinates relative to the node lattice.
    const double u = (x[0] + 0.5 * f.domain.side_length) / h - 0.5;
    const double v = (x[1] + 0.5 * f.domain.side_length) / h - 0.5;
    const int i0 = static_cast<int>(std::floor(u));
    const int j0 = static_cast<int>(std::floor(v));
    const double fu = u - i0, fv = v - j0;
    auto at = [&](int i, int j) -> double {
        if (i < 0 || j < 0 || i >= n || j >= n) return 0.0;  // zero extension
        return f.values(i, j);
    };
    return (1 - fu) * (1 - fv) * at(i0, j0) + fu * (1 - fv) * at(i0 + 1, j0) +
           (1 - fu) * fv * at(i0, j0 + 1) + fu * fv * at(i0 + 1, j0 + 1);
}

}  // namespace besovlab
