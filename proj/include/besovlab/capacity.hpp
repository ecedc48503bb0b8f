#pragma once

#include "besovlab/besov.hpp"
#include "besovlab/constructions.hpp"
#include "besovlab/homeo.hpp"
#include "besovlab/offset_sampler.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace besovlab {

// ============================================================================
// Condenser capacity: convex minimization of the difference seminorm
// ============================================================================

using MaskXX = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// 8-neighbor connectivity of the true nodes (empty mask is connected).
bool mask_connected_8(const MaskXX& mask);

/// Euclidean diameter of the mask's node set (coordinates, not cells).
double mask_diameter(const Domain& domain, const MaskXX& mask);

/// Exact Euclidean distance from every node to the mask, physical units
/// (two-pass lower-envelope transform of squared distances).
ArrayXXd distance_to_mask(const Domain& domain, const MaskXX& mask);

/**
 * Condenser (E, F) on a grid: the capacity is the least seminorm of a
 * potential u with u <= 0 on E and u >= 1 on F. `lambda` is
 * min(diam E, diam F) / ball_radius.
 *
 * Lambda semantics (the lower-bound law in it) are claimed only when both
 * masks are 8-connected and contained in the enclosing ball; then
 * lambda must lie in (0, 1]. Plate-style specs whose E fills the ball
 * complement carry lambda as a plain diagnostic.
 */
struct CondenserSpec {
    Domain domain;
    MaskXX e_mask, f_mask;
    Vec2 ball_center = Vec2::Zero();
    double ball_radius = 0.0;
    double lambda = 0.0;
    bool lambda_claimed = false;

    /// Validates: masks shaped N x N, disjoint, nonempty; ball inside the
    /// box; F inside the ball; lambda range when claimed.
    static CondenserSpec make(const Domain& domain, MaskXX e_mask, MaskXX f_mask,
                              const Vec2& ball_center, double ball_radius);

    /// True when E covers every node outside the ball and the ball sits in
    /// the quarter-width box: feasible potentials then vanish far out, so
    /// the objective carries the exact far-field tail.
    bool compact_support_enforced() const;

    double support_radius() const { return ball_center.norm() + ball_radius; }
};

/// Two horizontal 1-node-wide segments of length lambda * ball_radius at
/// height +- separation/2, F above, E below; enclosing ball at the origin.
/// At least the two central columns are used even when lambda * R is below
/// one spacing, so the recorded lambda may exceed the request on coarse
/// grids.
CondenserSpec segment_pair_spec(const Domain& domain, double ball_radius,
                                double lambda, double separation);

/// Plate condenser of make_annulus_condenser geometry: E = nodes outside
/// B(center, R) (compact support enforced), F = nodes in B(center, r).
CondenserSpec annulus_condenser_spec(const Domain& domain, const Vec2& center,
                                     double r, double R);

struct SolverConfig {
    int max_iters = 400;
    double step_scale = 0.25;  // initial sup-norm trial step
    double tolerance = 1e-4;   // relative objective decrease per 25 iterations
    double epsilon = 0.0;      // gradient kernel smoothing near 0
    unsigned threads = 1;

    void validate() const;
};

struct SolveResult {
    GridFunction u;
    double value = 0.0;      // objective^(1/q), the reported capacity bound
    double objective = 0.0;  // q-th power actually minimized
    int iterations = 0;
    int rejected_steps = 0;
    bool converged = false;
    bool tail_included = false;
    std::vector<double> trace;  // objective after each iteration, non-increasing
    std::vector<std::string> warnings;
};

/**
 * Projected gradient descent with an adaptive trial step (geometric growth
 * on acceptance, backoff on rejection) and explicit acceptance, so the
 * objective trace is monotone by construction. The
 * objective is the sampler-truncated q-th power of the difference seminorm;
 * the exact far tail is added when the spec enforces compact support.
 * Otherwise the objective keeps only pairs inside the box, which makes it
 * invariant under u -> 1 - u (swapping the plates mirrors the problem), and
 * the truncation is reported in warnings. Projection clips u to
 * 0 on E, 1 on F and [0, 1] elsewhere; truncation does not increase the
 * seminorm for these boundary data, so the restriction is harmless.
 *
 * Initialization: warm start when given (projected), else the normalized
 * distance ratio d(x,E) / (d(x,E) + d(x,F)). With a warm start the final
 * value never exceeds the warm start's objective.
 *
 * pre: finite q >= 1 and p >= 1 (convex objective).
 * post: result.u exactly feasible; trace non-increasing; converged means the
 *       tolerance was met before the iteration cap.
 */
SolveResult solve_condenser(const CondenserSpec& spec, const BesovParams& params,
                            const OffsetSampler& sampler, const SolverConfig& cfg,
                            const std::optional<GridFunction>& warm_start =
                                std::nullopt);

// ============================================================================
// Capacity law sweeps
// ============================================================================

/// Lower-bound sweep: segment condensers across lambda at fixed ball radius.
struct CapacityLowerReport {
    struct Entry {
        double lambda_requested = 0.0;
        double lambda = 0.0;  // node-snapped value actually realized
        double value = 0.0;
        int iterations = 0;
        bool converged = false;
    };
    std::vector<Entry> entries;
    double slope = 0.0;        // log value vs log lambda, converged entries
    double floor_value = 0.0;  // smallest converged value
    int excluded = 0;          // unconverged entries left out of the fit
    std::vector<std::string> notes;
};

CapacityLowerReport verify_capacity_lower(const std::vector<double>& lambdas,
                                          const BesovParams& params,
                                          const Domain& domain,
                                          double ball_radius, double separation,
                                          const OffsetSampler& sampler,
                                          const SolverConfig& cfg);

/// Upper-bound table: the solver against the explicit annulus construction
/// at each radius ratio; the construction warm-starts the solve, so
/// solver <= construction holds by descent on the same objective.
struct CapacityUpperReport {
    struct Entry {
        double ratio = 0.0;
        double solver_value = 0.0;
        double construction_value = 0.0;
        int iterations = 0;
        bool converged = false;
    };
    std::vector<Entry> entries;
    std::vector<std::string> notes;
};

CapacityUpperReport verify_capacity_upper(const std::vector<double>& ratios,
                                          const BesovParams& params,
                                          const Domain& domain,
                                          const OffsetSampler& sampler,
                                          const SolverConfig& cfg,
                                          int truncation = 16);

// ============================================================================
// Quasiconformality diagnostic
// ============================================================================

/**
 * Three-way verdict from the quasisymmetry scan, the Jacobian level census
 * and two report-only condenser audits:
 *   - "distortion-unbounded"       scan max doubles when probes quadruple;
 *   - "bi-Lipschitz-like"          census bins <= 3 and scan max <= 8;
 *   - "QC-not-biLipschitz-like"    otherwise.
 * The thresholds are working heuristics, not theorems. Because both scans
 * share one seed, the long scan extends the short one, so its maximum never
 * decreases.
 */
struct QcCheckReport {
    std::string verdict;
    double h_hat = 0.0;       // scan maximum at 4 * probes
    double h_hat_base = 0.0;  // scan maximum at probes
    int probes = 0;
    LevelCensus census;

    struct CondenserProbe {
        Vec2 source_center = Vec2::Zero();
        double source_r = 0.0, source_cap_r = 0.0;
        double image_r = 0.0, image_cap_r = 0.0;
        double image_ratio = 0.0;  // image_cap_r / image_r
        double source_value = 0.0, image_value = 0.0;
        bool skipped = false;
        std::string note;
    };
    std::vector<CondenserProbe> condenser_probes;
    int skipped_probes = 0;
    std::vector<std::string> notes;
};

QcCheckReport qc_check(const Homeomorphism& phi, const BesovParams& params,
                       int probes, std::uint64_t seed, const Domain& domain);

}  // namespace besovlab
