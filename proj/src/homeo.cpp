#include "besovlab/homeo.hpp"

#include "besovlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace besovlab {

namespace {

std::function<bool(const Vec2&)> everywhere() {
    return [](const Vec2&) { return true; };
}

Vec2 sample_point(std::mt19937_64& rng, const Domain& region) {
    const double L = region.side_length;
    return {detail::uniform01(rng) * L - L / 2.0,
            detail::uniform01(rng) * L - L / 2.0};
}

}  // namespace

// ============================================================================
// Factories
// ============================================================================

Homeomorphism identity_map() {
    Homeomorphism phi;
    phi.label = "identity";
    phi.kind = MapKind::affine;
    phi.forward = [](const Vec2& x) { return x; };
    phi.inverse = [](const Vec2& x) { return x; };
    phi.jacobian_det = [](const Vec2&) { return 1.0; };
    phi.regular = everywhere();
    return phi;
}

Homeomorphism affine_map(const Eigen::Matrix2d& A, const Vec2& b) {
    const double det = A.determinant();
    if (det == 0.0 || !std::isfinite(det)) {
        throw ValidationError("affine_map: matrix is singular");
    }
    const Eigen::Matrix2d inv = A.inverse();
    Homeomorphism phi;
    phi.label = "affine";
    phi.kind = MapKind::affine;
    phi.forward = [A, b](const Vec2& x) -> Vec2 { return A * x + b; };
    phi.inverse = [inv, b](const Vec2& y) -> Vec2 { return inv * (y - b); };
    phi.jacobian_det = [det](const Vec2&) { return det; };
    phi.regular = everywhere();
    return phi;
}

Homeomorphism rotation_map(double angle) {
    Eigen::Matrix2d A;
    A << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    Homeomorphism phi = affine_map(A);
    phi.label = "rotation(" + std::to_string(angle) + ")";
    return phi;
}

Homeomorphism shear_map(double slope) {
    Eigen::Matrix2d A;
    A << 1.0, 0.0, slope, 1.0;
    Homeomorphism phi = affine_map(A);
    phi.label = "shear(" + std::to_string(slope) + ")";
    phi.kind = MapKind::shear;
    return phi;
}

Homeomorphism radial_stretch(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ValidationError("radial_stretch: alpha must be positive");
    }
    Homeomorphism phi;
    phi.label = "radial_stretch(" + std::to_string(alpha) + ")";
    phi.kind = MapKind::radial_stretch;
    phi.forward = [alpha](const Vec2& x) -> Vec2 {
        const double r = x.norm();
        if (r == 0.0) return Vec2::Zero();
        return std::pow(r, alpha - 1.0) * x;
    };
    const double ainv = 1.0 / alpha;
    phi.inverse = [ainv](const Vec2& y) -> Vec2 {
        const double r = y.norm();
        if (r == 0.0) return Vec2::Zero();
        return std::pow(r, ainv - 1.0) * y;
    };
    phi.jacobian_det = [alpha](const Vec2& x) {
        const double r = x.norm();
        if (r == 0.0) {
            if (alpha == 1.0) return 1.0;
            return alpha > 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        return alpha * std::pow(r, 2.0 * (alpha - 1.0));
    };
    phi.regular = [](const Vec2& x) { return x.norm() > 1e-3; };
    return phi;
}

namespace {

// Strip index of the dyadic chord map: |t| in [2^(-k-1), 2^(-k)), k >= 0,
// with a correction loop because log2 can land one level off at breakpoints.
int chord_level(double a) {
    int k = static_cast<int>(std::floor(-std::log2(a)));
    if (k < 0) k = 0;
    while (a < std::exp2(-k - 1)) ++k;
    while (k > 0 && a >= std::exp2(-k)) --k;
    return k;
}

double chord_slope(int k, double alpha) {
    return std::exp2((1.0 - alpha) * k) * 2.0 * (1.0 - std::exp2(-alpha));
}

}  // namespace

Homeomorphism eccentric_scaler(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw ValidationError("eccentric_scaler: rate must be positive");
    }
    const double alpha = 1.0 + rate;
    Homeomorphism phi;
    phi.label = "eccentric_scaler(" + std::to_string(rate) + ")";
    phi.kind = MapKind::eccentric;
    phi.forward = [alpha](const Vec2& x) -> Vec2 {
        const double t = x.x(), a = std::abs(t);
        if (a >= 1.0 || a == 0.0) return x;
        const int k = chord_level(a);
        const double lo = std::exp2(-k - 1);
        const double y = std::exp2(-alpha * (k + 1)) +
                         chord_slope(k, alpha) * (a - lo);
        return {std::copysign(y, t), x.y()};
    };
    phi.inverse = [alpha](const Vec2& y) -> Vec2 {
        const double u = y.x(), a = std::abs(u);
        if (a >= 1.0 || a == 0.0) return y;
        int k = static_cast<int>(std::floor(-std::log2(a) / alpha));
        if (k < 0) k = 0;
        while (a < std::exp2(-alpha * (k + 1))) ++k;
        while (k > 0 && a >= std::exp2(-alpha * k)) --k;
        const double t = std::exp2(-k - 1) +
                         (a - std::exp2(-alpha * (k + 1))) /
                             chord_slope(k, alpha);
        return {std::copysign(t, u), y.y()};
    };
    phi.jacobian_det = [alpha](const Vec2& x) {
        const double a = std::abs(x.x());
        if (a >= 1.0) return 1.0;
        if (a == 0.0) return 0.0;
        return chord_slope(chord_level(a), alpha);
    };
    phi.regular = [](const Vec2& x) {
        const double a = std::abs(x.x());
        if (a <= 1e-3) return false;
        // stay clear of the breakpoints by 10 finite-difference steps
        const double margin = 1e-4 * std::max(1.0, x.norm());
        const double near = std::exp2(-chord_level(std::min(a, 0.999)));
        return std::abs(a - near) > margin && std::abs(a - near / 2.0) > margin &&
               std::abs(a - 1.0) > margin;
    };
    return phi;
}

Homeomorphism compose_maps(const Homeomorphism& outer, const Homeomorphism& inner) {
    Homeomorphism phi;
    phi.label = outer.label + " o " + inner.label;
    phi.kind = MapKind::composition;
    const auto of = outer.forward, inf = inner.forward;
    const auto oi = outer.inverse, ini = inner.inverse;
    const auto oj = outer.jacobian_det, inj = inner.jacobian_det;
    const auto oreg = outer.regular, inreg = inner.regular;
    phi.forward = [of, inf](const Vec2& x) { return of(inf(x)); };
    phi.inverse = [oi, ini](const Vec2& y) { return ini(oi(y)); };
    phi.jacobian_det = [oj, inj, inf](const Vec2& x) {
        return oj(inf(x)) * inj(x);
    };
    phi.regular = [oreg, inreg, inf](const Vec2& x) {
        return inreg(x) && oreg(inf(x));
    };
    return phi;
}

// ============================================================================
// Validation probes
// ============================================================================

double max_roundtrip_error(const Homeomorphism& phi, const Domain& region,
                           int probes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < probes; ++i) {
        const Vec2 x = sample_point(rng, region);
        worst = std::max(worst, (phi.inverse(phi.forward(x)) - x).norm());
    }
    return worst;
}

double max_jacobian_fd_error(const Homeomorphism& phi, const Domain& region,
                             int probes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    int used = 0, attempts = 0;
    while (used < probes && attempts < 100 * probes) {
        ++attempts;
        const Vec2 x = sample_point(rng, region);
        if (phi.regular && !phi.regular(x)) continue;
        ++used;
        const double h = 1e-5 * std::max(1.0, x.norm());
        const Vec2 dx1 = phi.forward(x + Vec2(h, 0)) - phi.forward(x - Vec2(h, 0));
        const Vec2 dx2 = phi.forward(x + Vec2(0, h)) - phi.forward(x - Vec2(0, h));
        const double fd =
            (dx1.x() * dx2.y() - dx1.y() * dx2.x()) / (4.0 * h * h);
        const double j = phi.jacobian_det(x);
        worst = std::max(worst, std::abs(fd - j) / std::max(std::abs(j), 1e-300));
    }
    return worst;
}

// ============================================================================
// Composition sampling
// ============================================================================

namespace {

GridFunction finish_composition(GridFunction g) {
    const int n = g.resolution();
    double radius = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (g.values(i, j) != 0.0) {
                radius = std::max(radius, g.domain.node(i, j).norm());
            }
        }
    }
    g.support_radius = radius + g.spacing();
    return g;
}

}  // namespace

GridFunction compose_function(const AnalyticFn& f, const Homeomorphism& phi,
                              const Domain& domain) {
    const auto fwd = phi.forward;
    return finish_composition(
        sample([&f, fwd](const Vec2& x) { return f(fwd(x)); }, domain));
}

GridFunction compose_function(const GridFunction& f, const Homeomorphism& phi,
                              const Domain& domain) {
    const auto fwd = phi.forward;
    return finish_composition(sample(
        [&f, fwd](const Vec2& x) { return bilinear_interpolate(f, fwd(x)); },
        domain));
}

// ============================================================================
// Quasisymmetry scan
// ============================================================================

double quasisymmetry_scan(const Homeomorphism& phi, int probes,
                          std::uint64_t seed, const Domain& region) {
    if (probes < 1000) {
        throw ValidationError("quasisymmetry_scan: need at least 1000 probes");
    }
    std::mt19937_64 rng(seed);
    const double L = region.side_length;
    const double r_max = L / 4.0, r_min = 1e-6 * L;
    const double lr = std::log(r_max / r_min);

    double h_hat = 0.0;
    for (int i = 0; i < probes; ++i) {
        double ratio = 0.0;
        for (int attempt = 0; attempt < 64; ++attempt) {
            const Vec2 x = sample_point(rng, region);
            const double dz = r_min * std::exp(detail::uniform01(rng) * lr);
            const double dy = dz * detail::uniform01(rng);
            const double ay = detail::uniform01(rng) * 2.0 * std::numbers::pi;
            const double az = detail::uniform01(rng) * 2.0 * std::numbers::pi;
            const Vec2 y = x + dy * Vec2(std::cos(ay), std::sin(ay));
            const Vec2 z = x + dz * Vec2(std::cos(az), std::sin(az));
            const Vec2 fx = phi.forward(x);
            const double den = (phi.forward(z) - fx).norm();
            if (den == 0.0) continue;  // degenerate triple: resample
            ratio = (phi.forward(y) - fx).norm() / den;
            break;
        }
        h_hat = std::max(h_hat, ratio);
    }

    // Structured axis ladder, one rung per 500 probes. Anchors hug the
    // vertical axis and the origin at geometrically shrinking scales, probing
    // a vertical y-leg against an equally long horizontal z-leg.
    std::mt19937_64 ladder_rng(seed ^ 0x1adde5ULL);
    const int rungs = probes / 500;
    for (int j = 0; j < rungs; ++j) {
        const double t = r_max * std::exp2(-j / 8.0);
        if (t < 1e-280) break;
        const double x2 = (detail::uniform01(ladder_rng) - 0.5) * 0.9 * L;
        const Vec2 anchors[] = {{0.75 * t, x2},
                                {-0.75 * t, x2},
                                {0.75 * t, 0.45 * t}};
        for (const Vec2& x : anchors) {
            const Vec2 fx = phi.forward(x);
            const double sgn = (x.x() < 0.0) ? -1.0 : 1.0;
            const double den =
                (phi.forward(x + Vec2(sgn * 0.25 * t, 0.0)) - fx).norm();
            if (den == 0.0) continue;
            const double num =
                (phi.forward(x + Vec2(0.0, 0.25 * t)) - fx).norm();
            h_hat = std::max(h_hat, num / den);
        }
    }
    return h_hat;
}

// ============================================================================
// Jacobian level census
// ============================================================================

namespace detail {

int jacobian_level_index(double j) {
    // Solve 2^{-2(k+1)} <= j < 2^{-2k} with exact boundary placement.
    int k = static_cast<int>(std::ceil(-std::log2(j) / 2.0)) - 1;
    while (j < std::exp2(-2.0 * (k + 1))) ++k;
    while (j >= std::exp2(-2.0 * k)) --k;
    return k;
}

}  // namespace detail

LevelCensus jacobian_level_census(const Homeomorphism& phi, const Domain& domain,
                                  int k_lo, int k_hi) {
    if (k_lo > k_hi) {
        throw ValidationError("jacobian_level_census: empty band range");
    }
    LevelCensus census;
    census.domain = domain;
    const double w = domain.spacing() * domain.spacing();
    std::map<int, std::int64_t> counts;
    for (int ix = 0; ix < domain.resolution; ++ix) {
        for (int iy = 0; iy < domain.resolution; ++iy) {
            const double j = std::abs(phi.jacobian_det(domain.node(ix, iy)));
            if (j == 0.0) {
                ++census.zero_nodes;
            } else if (!std::isfinite(j)) {
                throw NumericalError("jacobian_level_census: non-finite Jacobian");
            } else {
                ++counts[detail::jacobian_level_index(j)];
            }
        }
    }
    census.zero_measure = census.zero_nodes * w;
    for (const auto& [k, nodes] : counts) {
        census.entries.push_back({k, nodes, nodes * w});
        if (k < k_lo || k > k_hi) {
            census.warnings.push_back("band " + std::to_string(k) +
                                      " outside requested range");
        }
    }
    return census;
}

}  // namespace besovlab
