#pragma once

#include "besovlab/grid.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace besovlab {

// ============================================================================
// Planar homeomorphisms with exact inverses and Jacobians
// ============================================================================

enum class MapKind { affine, radial_stretch, shear, eccentric, composition };

/**
 * Homeomorphism of the plane given by closed-form forward/inverse/Jacobian
 * evaluators. `regular` marks points where the map is differentiable enough
 * for finite-difference Jacobian checks (e.g. excludes the origin for the
 * radial family); it never restricts evaluation.
 */
struct Homeomorphism {
    std::string label;
    MapKind kind = MapKind::affine;
    std::function<Vec2(const Vec2&)> forward;
    std::function<Vec2(const Vec2&)> inverse;
    std::function<double(const Vec2&)> jacobian_det;
    std::function<bool(const Vec2&)> regular;  // default: everywhere
};

Homeomorphism identity_map();
/// Invertible affine map x -> A x + b; rejects singular A.
Homeomorphism affine_map(const Eigen::Matrix2d& A, const Vec2& b = Vec2::Zero());
Homeomorphism rotation_map(double angle);
Homeomorphism shear_map(double slope);

/// phi(x) = |x|^(alpha-1) x, phi(0) = 0: quasiconformal for every alpha > 0,
/// bi-Lipschitz only at alpha = 1. Inverse is the stretch with 1/alpha;
/// Jacobian alpha |x|^(2(alpha-1)).
Homeomorphism radial_stretch(double alpha);

/// phi(x) = (f(x1), x2) with f the chord interpolant of sign(t) |t|^(1+rate)
/// on the dyadic breakpoints +-2^(-k) and the identity outside [-1, 1]:
/// piecewise affine, slope 2^(-rate k) 2 (1 - 2^(-1-rate)) on the k-th strip,
/// so the eccentricity blows up toward the vertical axis. A homeomorphism,
/// not quasiconformal. Jacobian equals the strip slope; `regular` excludes
/// the breakpoints and a thin slab around x1 = 0.
Homeomorphism eccentric_scaler(double rate);

/// outer after inner, with composed label/inverse/Jacobian.
Homeomorphism compose_maps(const Homeomorphism& outer, const Homeomorphism& inner);

// ============================================================================
// Validation probes
// ============================================================================

/// max |inverse(forward(x)) - x| over seeded uniform probe points.
double max_roundtrip_error(const Homeomorphism& phi, const Domain& region,
                           int probes, std::uint64_t seed);

/// max relative |jacobian_det - central FD determinant| over seeded regular
/// probe points.
double max_jacobian_fd_error(const Homeomorphism& phi, const Domain& region,
                             int probes, std::uint64_t seed);

// ============================================================================
// Composition sampling
// ============================================================================

/**
 * Samples f(phi(x)) at the domain nodes (exact; analytic route). The support
 * radius is measured from the samples: the largest node radius with a
 * nonzero value, plus one spacing of slack.
 */
GridFunction compose_function(const AnalyticFn& f, const Homeomorphism& phi,
                              const Domain& domain);

/// Bilinear-interpolated route for grid-backed f (zero outside f's box);
/// callers must flag interpolation in their reports.
GridFunction compose_function(const GridFunction& f, const Homeomorphism& phi,
                              const Domain& domain);

// ============================================================================
// Quasisymmetry scan
// ============================================================================

/**
 * H_hat = max over seeded probe triples (x, y, z), |x-y| <= |x-z|, of
 * |phi(x)-phi(y)| / |phi(x)-phi(z)|.
 *
 * Random part: x uniform in the region, |x-z| log-uniform in [1e-6 L, L/4]
 * (so distortion concentrated at small scales is seen), |x-y| a uniform
 * fraction of |x-z|; directions uniform. Degenerate triples (phi(x) =
 * phi(z)) are resampled.
 *
 * Structured part: one axis-aligned rung per 500 probes, anchored near the
 * vertical axis and near the origin at scales shrinking geometrically with
 * the rung index. Bounded distortion saturates the rung ratios, while
 * genuinely unbounded eccentricity keeps producing larger ones as the
 * ladder deepens with the probe count; the doubling diagnostic in qc_check
 * consumes exactly that growth.
 *
 * Deterministic per seed; more probes extend both parts, so the maximum is
 * monotone in `probes` at fixed seed. probes >= 1000.
 */
double quasisymmetry_scan(const Homeomorphism& phi, int probes,
                          std::uint64_t seed, const Domain& region);

// ============================================================================
// Jacobian level census
// ============================================================================

/**
 * Node-count measure of the dyadic Jacobian bands
 * 2^{-n(k+1)} <= |J| < 2^{-nk} (half-open; a value on a boundary joins the
 * band whose lower endpoint it equals). Nodes with J = 0 are tallied
 * separately, so band counts plus the zero tally equal the node total
 * exactly.
 */
struct LevelCensus {
    struct Entry {
        int k = 0;
        std::int64_t nodes = 0;
        double measure = 0.0;  // nodes * spacing^2
    };
    std::vector<Entry> entries;  // ascending k, empty bands omitted
    std::int64_t zero_nodes = 0;
    double zero_measure = 0.0;
    Domain domain;
    std::vector<std::string> warnings;  // bands outside the requested range

    std::size_t bins() const { return entries.size(); }
};

/// Census over all domain nodes; k_lo..k_hi is the expected band range, and
/// bands observed outside it are still recorded but flagged in warnings.
LevelCensus jacobian_level_census(const Homeomorphism& phi, const Domain& domain,
                                  int k_lo, int k_hi);

namespace detail {

/// Band index of a positive Jacobian magnitude (n = 2): the unique k with
/// 2^{-n(k+1)} <= j < 2^{-nk}, exact on dyadic boundaries.
int jacobian_level_index(double j);

}  // namespace detail

}  // namespace besovlab
