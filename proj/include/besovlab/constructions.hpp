#pragma once

#include "besovlab/besov.hpp"
#include "besovlab/bump_norm.hpp"

#include <utility>
#include <vector>

namespace besovlab {

// ============================================================================
// Tent-bump stacks
// ============================================================================

/// Placement mode for multi-bump stacks: concentric (all bumps share one
/// center, summing to a single radial profile) or separated (the 9-dilated
/// support balls must be pairwise disjoint).
enum class StackMode { concentric, disjoint };

/**
 * Family of tent bumps f_j(y) = b_j * max(0, 1 - |y - c_j| / r_j).
 * Tents make all Lipschitz constants exact: Lip f_j = b_j / r_j.
 */
struct BumpFamily {
    std::vector<Vec2> centers;
    std::vector<double> radii;
    std::vector<double> amplitudes;

    std::size_t size() const { return centers.size(); }
    double lipschitz(std::size_t j) const { return amplitudes[j] / radii[j]; }

    /// Pointwise value of F = sum_j f_j.
    double evaluate(const Vec2& y) const;
    AnalyticFn analytic() const;

    /// max_j (|c_j| + r_j): every node beyond it samples to zero.
    double support_radius() const;

    /// Per-bump specs for the separated-support radial evaluator.
    std::vector<BumpSpec> bump_specs() const;
};

/// Collapses a concentric family into one radial bump (profiles add).
/// Rejects families whose centers differ.
BumpSpec concentric_radial_spec(const BumpFamily& family);

struct StackResult {
    BumpFamily family;
    GridFunction field;  // F sampled on the caller's domain
};

/**
 * Stack with dyadic radii r_j = 2^{-j} R, j = 0 .. len(amplitudes)-1.
 * Concentric mode requires all centers equal (a single center broadcasts);
 * disjoint mode rejects any pair whose 9-dilated balls overlap, naming it.
 * Amplitudes must be positive (truncation is by list length).
 */
StackResult make_dyadic_stack(const std::vector<Vec2>& centers, double R,
                              const std::vector<double>& amplitudes,
                              StackMode mode, const Domain& domain);

/// Stack with equal radii r_j = R; 9-dilated balls must be pairwise disjoint.
StackResult make_equal_stack(const std::vector<Vec2>& centers, double R,
                             const std::vector<double>& amplitudes,
                             const Domain& domain);

// ============================================================================
// Annulus condenser and its profile
// ============================================================================

/**
 * Radial profile of the unit concentric stack (amplitudes (j+1)^{-1}, outer
 * radius 1) at relative radius sigma:
 *
 *   sum_{j < truncation} (j+1)^{-1} * max(0, 1 - 2^j sigma),
 *
 * strictly decreasing in sigma on (0,1) and zero at sigma = 1, with the
 * harmonic lower bound
 * >= 1/2 * sum_{j=0}^{floor(-log2(2 sigma))} (j+1)^{-1} while that index
 * stays below the truncation.
 */
double harmonic_stack_profile(double sigma, int truncation);

/**
 * Condenser potential u = min(1, F / xi) where F is the unit concentric
 * stack of outer radius R at x0 and xi its profile value at r/R: exactly 1
 * on the closed inner ball, exactly 0 outside the outer ball, radially
 * non-increasing, sampled without interpolation error.
 */
struct CondenserFunction {
    Vec2 center = Vec2::Zero();
    double inner = 0.0;
    double outer = 0.0;
    int truncation = 0;
    std::function<double(double)> radial;  // exact profile rho -> u
    GridFunction field;
};

/// Requires 0 < r < R <= side_length/4.
CondenserFunction make_annulus_condenser(const Vec2& x0, double r, double R,
                                         int truncation, const Domain& domain);

/// Seminorm of the unit concentric stack with outer radius R; the measured
/// constant in the condenser upper bound norm(u) <= c' / profile(r/R).
double concentric_unit_stack_norm(const BesovParams& params, double R,
                                  int truncation);

/**
 * Measured seminorms of annulus condensers across outer/inner ratios > 1,
 * outer radius fixed at side_length/4. Decreasing in the ratio, mirroring
 * the decreasing capacity profile.
 */
std::vector<std::pair<double, double>> annulus_norm_profile(
    const std::vector<double>& ratios, const BesovParams& params,
    const Domain& domain, int truncation = 16);

// ============================================================================
// Anisotropic box
// ============================================================================

/**
 * u(x) = clamp(2 - max(|x1|/A1, |x2|/A2), 0, 1): 1 on [-A1,A1]x[-A2,A2],
 * 0 outside the doubled box, linear in between. Requires 0 < A1 <= A2 and
 * 3 * A2 <= side_length / 2.
 */
GridFunction make_anisotropic_box(double A1, double A2, const Domain& domain);

}  // namespace besovlab
