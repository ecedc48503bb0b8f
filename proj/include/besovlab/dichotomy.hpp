#pragma once

#include "besovlab/besov.hpp"
#include "besovlab/bump_norm.hpp"
#include "besovlab/grid.hpp"
#include "besovlab/homeo.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace besovlab {

/// One measured pair (level sum G, composed G after the map) at a fixed
/// level count. `family` names which side carries the dyadic radii:
///   "dyadic_image": equal source balls, image radii shrink dyadically;
///   "equal_image":  equal image balls, source supports grow dyadically.
/// `alpha` is the measured local aspect of the map along the placement ray
/// (ratio of the radial to the tangential stretch factor).
struct DichotomyRow {
    std::string family;
    double alpha = 1.0;
    double s = 0.0;
    double q = 0.0;
    double p = 0.0;
    int levels = 0;
    double norm_g = 0.0;
    double norm_g_phi = 0.0;
    double ratio = 0.0;
    std::uint64_t seed = 0;
};

/// Composition experiment report. `max_ratio[m-1]` is the larger of the two
/// family ratios at level count m; `slope` is the log-log fit of that
/// sequence against the level count (NaN when only one level was run), and
/// `slope_reference` is |1/q - 1/p|, the growth exponent that a genuinely
/// non-bi-Lipschitz map must produce on one of the two families when
/// q differs from the scaling-invariant index.
struct DichotomyReport {
    std::vector<DichotomyRow> rows;
    std::vector<double> max_ratio;
    double slope = 0.0;
    double slope_reference = 0.0;
    std::vector<std::string> notes;
};

/// Runs the two-family composition experiment for a planar homeomorphism.
///
/// Test bumps are placed on the ray (1,0) at dyadic radii |x_j| = 2^{-k-1},
/// k = 1..levels, so the Jacobian volume bands of the placements are
/// pairwise distinct. Both constructions shrink their base scale until the
/// four placement constraints hold simultaneously: source supports pairwise
/// 9-separated, image supports pairwise 9-separated, and both families
/// inside the quarter-width concentric box of `domain`. If no scale works,
/// the call is rejected with the maximal feasible level count in the
/// message.
///
/// The image-side sums are families of radial tents and are measured
/// directly. The composed sums are measured through the per-level affine
/// linearization of the map, which turns each pulled-back tent into an
/// elliptical tent of common eccentricity; an exact change of variables
/// reduces that family to a radial one times a shape factor.
///
/// pre: 1 <= levels <= 6; params scaling-invariant (no p override);
///      amplitudes empty (all-ones) or exactly `levels` entries, positive;
///      the map has uniform local aspect along the ray (within 2%).
/// throws: ValidationError on precondition or placement failure,
///         NumericalError on non-finite map samples.
DichotomyReport dichotomy_experiment(const Homeomorphism& phi,
                                     int levels,
                                     std::vector<double> amplitudes,
                                     const BesovParams& params,
                                     const Domain& domain,
                                     std::uint64_t seed,
                                     const BumpNormConfig& config = {});

namespace detail {

/// Seminorm of a family of elliptical tents sharing the axis-aligned shape
/// matrix diag(1/aspect, 1): value equals `shape_factor * radial norm` of
/// the transformed family. Exposed for tests.
double elliptical_shape_factor(double aspect, const BesovParams& params);

}  // namespace detail

}  // namespace besovlab
