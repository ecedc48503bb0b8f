#pragma once

#include "besovlab/types.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>

namespace besovlab {

// ============================================================================
// Square sampling domain
// ============================================================================

/**
 * Axis-aligned square box [-L/2, L/2]^2 sampled on an N x N lattice of
 * cell-centered nodes: x_i = -L/2 + (i + 1/2) * spacing, spacing = L/N.
 *
 * Cell-centered nodes give every node the same quadrature weight spacing^2
 * with no double counting at the box edge.
 */
struct Domain {
    double side_length = 0.0;
    int resolution = 0;

    static Domain make(double side_length, int resolution);

    double spacing() const { return side_length / resolution; }

    /// Coordinate of node index i along either axis.
    double coord(int i) const {
        return -0.5 * side_length + (i + 0.5) * spacing();
    }

    Vec2 node(int ix, int iy) const { return {coord(ix), coord(iy)}; }

    bool operator==(const Domain& o) const {
        return side_length == o.side_length && resolution == o.resolution;
    }
};

// ============================================================================
// Grid-sampled scalar function
// ============================================================================

/**
 * Scalar function sampled at the domain nodes, extended by zero outside the
 * box. values(ix, iy) is the sample at node (coord(ix), coord(iy)).
 *
 * support_radius, when declared, asserts that the function vanishes at every
 * node with |x| > support_radius. Estimators that need far-field control
 * (tail corrections) require it.
 */
struct GridFunction {
    Domain domain;
    ArrayXXd values;
    std::optional<double> support_radius;

    int resolution() const { return domain.resolution; }
    double spacing() const { return domain.spacing(); }

    /// Throws ValidationError if a declared support radius is violated.
    void validate_support() const;
};

/// Pointwise evaluator defined on the plane.
using AnalyticFn = std::function<double(const Vec2&)>;

/**
 * Samples f at every node. Rejects non-finite samples, naming the offending
 * node. When support_radius is given, the support invariant is checked.
 */
GridFunction sample(const AnalyticFn& f, const Domain& domain,
                    std::optional<double> support_radius = std::nullopt);

// ============================================================================
// Difference and quadrature kernels
// ============================================================================

/**
 * g(x) = f(x + h) - f(x) with h = offset * spacing, zero extension outside
 * the box. Offset components must satisfy |di|, |dj| < N.
 *
 * The result never carries a support radius: differences spread support.
 */
GridFunction shift_difference(const GridFunction& f, int di, int dj);

/**
 * Sum of |f(x+h) - f(x)|^p over all nodes times spacing^2, without
 * materializing the shifted array. Equals lp_norm(shift_difference(f,...), p)^p.
 */
double shift_abs_pow_sum(const GridFunction& f, int di, int dj, double p);

/// Riemann L^p norm: (spacing^2 * sum |f|^p)^(1/p); p = infinity gives max |f|.
double lp_norm(const GridFunction& f, double p);

/// Quadrature rule marker: fixes the exponent used by L^p reductions.
struct LpQuadrature {
    double exponent;

    explicit LpQuadrature(double p);
    double norm(const GridFunction& f) const { return lp_norm(f, exponent); }
};

/// Bilinear interpolation of grid samples at an arbitrary point, zero outside.
double bilinear_interpolate(const GridFunction& f, const Vec2& x);

namespace detail {

/// Vectorized sum of |a|^p over an Eigen array expression (Riemann weight
/// excluded). Integer exponents take product fast paths; fractional ones go
/// through the vectorized pow kernel.
template <typename Derived>
double abs_pow_sum(const Eigen::ArrayBase<Derived>& a, double p) {
    if (a.size() == 0) return 0.0;
    const double rp = std::round(p);
    if (p == rp && p >= 1.0 && p <= 8.0) {
        switch (static_cast<int>(rp)) {
            case 1: return a.abs().sum();
            case 2: return a.square().sum();
            case 3: return (a.abs() * a.square()).sum();
            case 4: return a.square().square().sum();
            default: {
                ArrayXXd base = a.abs();
                ArrayXXd out = ArrayXXd::Ones(base.rows(), base.cols());
                int e = static_cast<int>(rp);
                while (e > 0) {
                    if (e & 1) out *= base;
                    e >>= 1;
                    if (e > 0) base *= base;
                }
                return out.sum();
            }
        }
    }
    return a.abs().pow(p).sum();
}

}  // namespace detail

}  // namespace besovlab
