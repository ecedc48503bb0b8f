#pragma once

#include "besovlab/grid.hpp"
#include "besovlab/offset_sampler.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace besovlab {

// ============================================================================
// Parameters
// ============================================================================

/**
 * Smoothness/integrability parameters of the homogeneous difference seminorm
 *
 *   ||f||^q = integral over h of |h|^(-qs) * ||f(.+h) - f||_p^q  dh / |h|^n.
 *
 * The dimension n stays symbolic in every exponent; the lattice pins n = 2.
 * p defaults to n/s, the unique exponent making the seminorm invariant under
 * dilations; q = infinity means the sup form.
 */
struct BesovParams {
    double s = 0.5;
    double q = 2.0;
    std::optional<double> p_override;
    int n = 2;
    bool scaling_invariant = true;

    double p() const { return p_override ? *p_override : n / s; }

    static BesovParams make(double s, double q,
                            std::optional<double> p_override = std::nullopt);
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ============================================================================
// Trace
// ============================================================================

/// Per-contribution audit rows for plotting estimator convergence.
struct NormTrace {
    struct Row {
        int level = 0;
        double t = 0.0;      // scale: |h| or ball radius
        double inner = 0.0;  // inner L^p value at this scale
        double term = 0.0;   // weighted contribution to the q-th power
    };
    std::string estimator;
    std::vector<Row> rows;
    double tail = 0.0;
    bool tail_exact = false;
    std::optional<double> small_t_estimate;
    std::vector<std::string> warnings;
};

// ============================================================================
// Difference estimator and its exhaustive oracle
// ============================================================================

/// Inner L^p norms of shift differences, grouped per sampler level.
/// The q-aggregation is decoupled so one profile serves many (s, q) pairs
/// with the same p.
struct DifferenceProfile {
    struct Term {
        int di = 0, dj = 0;
        double dist = 0.0;   // |h|
        double inner = 0.0;  // ||f(.+h) - f||_p
    };
    struct Level {
        int k = 0;
        double weight = 0.0;
        std::vector<Term> terms;
    };
    double p = 0.0;
    double outer_radius = 0.0;
    double lp_f = 0.0;  // ||f||_p, drives the far-field tail
    bool tail_exact = false;
    std::vector<Level> levels;
};

DifferenceProfile difference_profile(const GridFunction& f, double p,
                                     const OffsetSampler& sampler,
                                     unsigned threads = 1);

/// q-aggregation of a profile: stratified quadrature plus analytic far tail.
double aggregate_difference(const DifferenceProfile& profile,
                            const BesovParams& params,
                            NormTrace* trace = nullptr);

/**
 * Monte-Carlo-stratified difference seminorm.
 *
 * Requires a declared support radius <= side_length/4: beyond twice the
 * support radius the shifted and unshifted copies have disjoint supports, so
 * the tail integral over |h| >= outer_radius is (2^(1/p) ||f||_p)^q *
 * 2*pi*T^(-qs)/(qs) exactly; without the support the tail is undefined.
 */
double besov_norm_difference(const GridFunction& f, const BesovParams& params,
                             const OffsetSampler& sampler, unsigned threads = 1,
                             NormTrace* trace = nullptr);

/**
 * Exhaustive reference: the full double sum over node pairs (x, x + h) for
 * every lattice offset 0 < |h| < outer_radius, Riemann weights spacing^2 in
 * both x and h, plus the same analytic tail as the estimator. outer_radius
 * defaults to side_length/2, the largest truncation whose tail stays exact
 * under the support guard. Guarded to N <= 32. An exhaustive sampler with
 * the same outer radius reorganizes exactly these sums.
 */
double besov_norm_oracle(const GridFunction& f, const BesovParams& params,
                         std::optional<double> outer_radius = std::nullopt);

// ============================================================================
// Ball-oscillation (averaged-difference) characterization
// ============================================================================

/**
 * Scale profile of the ball-averaged p-oscillation
 *
 *   osc_p(f)(t) = ( integral_x avg_{|y-x|<t} |f(x)-f(y)|^p dy dx )^(1/p),
 *
 * discretized with the full lattice ball at each scale. Scales decrease
 * dyadically; the profile caches what the q-aggregation needs.
 */
struct OscillationProfile {
    struct Scale {
        double t = 0.0;
        double value = 0.0;
        std::int64_t ball_count = 0;  // lattice points in the ball, center included
    };
    double p = 0.0;
    double s_hint = 0.0;  // params.s at build time, echoed into traces
    std::vector<Scale> scales;  // strictly decreasing t
    std::optional<double> small_t_estimate;  // reported, never added
};

OscillationProfile oscillation_profile(const GridFunction& f,
                                       const BesovParams& params,
                                       const std::vector<double>& scales,
                                       unsigned threads = 1);

/// Dyadic scale list L/2, L/4, ... down to (but not below) 2 * spacing.
std::vector<double> default_oscillation_scales(const Domain& domain);

/**
 * Dyadic quadrature of the oscillation characterization: each scale stands
 * for one octave of dt/t (weight ln 2), and scales above the largest one are
 * approximated by its value (large-scale oscillation saturates), giving the
 * analytic tail C^q * t_max^(-sq) / (sq). Requires >= 3 scales.
 */
double besov_norm_from_oscillation(const OscillationProfile& profile,
                                   const BesovParams& params,
                                   NormTrace* trace = nullptr);

// ============================================================================
// Pointwise-gradient (annulus half-sup) characterization
// ============================================================================

/**
 * Constructive fractional gradient sequence: on the annulus
 * 2^(-k-1) <= |x-y| < 2^(-k),
 *
 *   g_k(x) = 1/2 * sup_y |f(x)-f(y)| / |x-y|^s,
 *
 * which satisfies the two-point upper bound |f(x)-f(y)| <=
 * |x-y|^s (g_k(x) + g_k(y)) by construction. Empty annuli give g_k = 0.
 */
struct HajlaszGradient {
    double s = 0.0;
    std::vector<std::pair<int, GridFunction>> levels;  // (k, g_k)
};

HajlaszGradient hajlasz_halfsup_gradient(const GridFunction& f,
                                         const BesovParams& params,
                                         const std::vector<int>& levels);

/// All annulus indices k whose annulus intersects [spacing, side_length/2].
std::vector<int> default_hajlasz_levels(const Domain& domain);

/// (sum_k ||g_k||_p^q)^(1/q); monotone non-increasing in q. q = inf takes sup.
double hajlasz_upper_bound(const HajlaszGradient& grad, const BesovParams& params);

// ============================================================================
// Shared pieces
// ============================================================================

namespace detail {

/// |h|^(-qs-n) for finite q; callers special-case q = infinity.
double difference_kernel(double dist, const BesovParams& params);

/// Far-field tail of the q-th power for |h| >= T: exact once T >= 2 * support.
double difference_tail_qpow(double lp_f, double T, const BesovParams& params);

}  // namespace detail

}  // namespace besovlab
