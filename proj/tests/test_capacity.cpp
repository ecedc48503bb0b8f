#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "besovlab/capacity.hpp"
#include "besovlab/homeo.hpp"
#include "besovlab/offset_sampler.hpp"
#include "besovlab/rng.hpp"
#include "besovlab/types.hpp"

using namespace besovlab;

namespace {

OffsetSampler test_sampler(const Domain& domain, std::uint64_t seed) {
    return build_offset_sampler(domain, domain.side_length / 2.0, 4, 24, seed);
}

SolverConfig quick_config(int iters = 200, double tol = 1e-5) {
    SolverConfig cfg;
    cfg.max_iters = iters;
    cfg.tolerance = tol;
    return cfg;
}

}  // namespace

TEST_CASE("8-connectivity sees diagonal links and separated blobs") {
    MaskXX mask = MaskXX::Constant(8, 8, false);
    mask(2, 2) = true;
    CHECK(mask_connected_8(mask));
    mask(3, 3) = true;  // diagonal neighbor
    CHECK(mask_connected_8(mask));
    mask(6, 6) = true;  // far blob
    CHECK(!mask_connected_8(mask));
}

TEST_CASE("mask diameter is the largest pairwise node distance") {
    const Domain domain = Domain::make(8.0, 8);  // spacing 1
    MaskXX mask = MaskXX::Constant(8, 8, false);
    mask(1, 1) = true;
    CHECK(mask_diameter(domain, mask) == doctest::Approx(0.0));
    mask(4, 5) = true;
    CHECK(mask_diameter(domain, mask) ==
          doctest::Approx(std::hypot(3.0, 4.0)).epsilon(1e-12));
}

TEST_CASE("distance transform equals brute force on a random mask") {
    const Domain domain = Domain::make(6.0, 12);
    MaskXX mask = MaskXX::Constant(12, 12, false);
    std::mt19937_64 rng(17);
    for (int i = 0; i < 10; ++i) {
        mask(static_cast<int>(detail::uniform01(rng) * 12),
             static_cast<int>(detail::uniform01(rng) * 12)) = true;
    }
    const ArrayXXd dist = distance_to_mask(domain, mask);
    for (int ix = 0; ix < 12; ++ix) {
        for (int iy = 0; iy < 12; ++iy) {
            double best = std::numeric_limits<double>::infinity();
            for (int jx = 0; jx < 12; ++jx) {
                for (int jy = 0; jy < 12; ++jy) {
                    if (!mask(jx, jy)) continue;
                    best = std::min(
                        best, (domain.node(ix, iy) - domain.node(jx, jy))
                                  .norm());
                }
            }
            CHECK(dist(ix, iy) == doctest::Approx(best).epsilon(1e-12));
        }
    }
}

TEST_CASE("segment spec claims the lambda law, annulus spec does not") {
    const Domain domain = Domain::make(8.0, 32);
    const CondenserSpec segments =
        segment_pair_spec(domain, 1.0, 0.5, 0.5);
    CHECK(segments.lambda_claimed);
    CHECK(segments.lambda > 0.0);
    CHECK(segments.lambda <= 1.0);
    CHECK(!segments.compact_support_enforced());
    CHECK((segments.e_mask && segments.f_mask).count() == 0);

    const CondenserSpec annulus =
        annulus_condenser_spec(domain, Vec2::Zero(), 0.25, 2.0);
    CHECK(!annulus.lambda_claimed);
    CHECK(annulus.compact_support_enforced());
}

TEST_CASE("spec construction rejects malformed condensers") {
    const Domain domain = Domain::make(8.0, 16);
    MaskXX e = MaskXX::Constant(16, 16, false);
    MaskXX f = MaskXX::Constant(16, 16, false);
    e(2, 2) = true;
    f(8, 8) = true;
    // F node (8,8) sits at coordinates (0.25, 0.25); a ball of radius 2 at
    // the origin contains it, so this is fine.
    CHECK_NOTHROW(CondenserSpec::make(domain, e, f, Vec2::Zero(), 2.0));
    // empty E
    MaskXX empty = MaskXX::Constant(16, 16, false);
    CHECK_THROWS_AS(CondenserSpec::make(domain, empty, f, Vec2::Zero(), 2.0),
                    ValidationError);
    // F outside the ball
    CHECK_THROWS_AS(CondenserSpec::make(domain, e, f, Vec2::Zero(), 0.1),
                    ValidationError);
    // overlapping masks
    MaskXX overlap = e;
    CHECK_THROWS_AS(
        CondenserSpec::make(domain, e, overlap, Vec2::Zero(), 2.0),
        ValidationError);
}

TEST_CASE("solver output is feasible with a monotone trace") {
    const Domain domain = Domain::make(8.0, 16);
    const CondenserSpec spec = segment_pair_spec(domain, 1.0, 0.5, 0.5);
    const BesovParams params = BesovParams::make(0.5, 2.0);
    const SolveResult result =
        solve_condenser(spec, params, test_sampler(domain, 5), quick_config());

    for (int ix = 0; ix < 16; ++ix) {
        for (int iy = 0; iy < 16; ++iy) {
            if (spec.e_mask(ix, iy)) CHECK(result.u.values(ix, iy) == 0.0);
            if (spec.f_mask(ix, iy)) CHECK(result.u.values(ix, iy) == 1.0);
            CHECK(result.u.values(ix, iy) >= 0.0);
            CHECK(result.u.values(ix, iy) <= 1.0);
        }
    }
    REQUIRE(!result.trace.empty());
    for (std::size_t i = 0; i + 1 < result.trace.size(); ++i) {
        CHECK(result.trace[i + 1] <= result.trace[i] + 1e-15);
    }
    CHECK(result.objective == doctest::Approx(result.trace.back()));
    CHECK(result.value ==
          doctest::Approx(std::pow(result.objective, 1.0 / params.q)));
    CHECK(!result.tail_included);
}

TEST_CASE("solver runs are deterministic") {
    const Domain domain = Domain::make(8.0, 16);
    const CondenserSpec spec = segment_pair_spec(domain, 1.0, 0.5, 0.5);
    const BesovParams params = BesovParams::make(0.5, 2.0);
    const SolveResult a =
        solve_condenser(spec, params, test_sampler(domain, 5), quick_config());
    const SolveResult b =
        solve_condenser(spec, params, test_sampler(domain, 5), quick_config());
    CHECK(a.value == b.value);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("solver rejects non-convex aggregation exponents") {
    const Domain domain = Domain::make(8.0, 16);
    const CondenserSpec spec = segment_pair_spec(domain, 1.0, 0.5, 0.5);
    CHECK_THROWS_AS(solve_condenser(spec, BesovParams::make(0.5, kInfinity),
                                    test_sampler(domain, 5), quick_config()),
                    ValidationError);
}

TEST_CASE("swapping the plates leaves the capacity unchanged") {
    // without a tail the objective of u for (E, F) equals that of 1 - u for
    // (F, E); the trajectories mirror up to rounding, so the minima agree at
    // the solver's convergence scale
    const Domain domain = Domain::make(8.0, 16);
    const CondenserSpec spec = segment_pair_spec(domain, 1.0, 0.5, 0.5);
    const CondenserSpec swapped = CondenserSpec::make(
        domain, spec.f_mask, spec.e_mask, spec.ball_center, spec.ball_radius);
    const BesovParams params = BesovParams::make(0.5, 2.0);
    const double a =
        solve_condenser(spec, params, test_sampler(domain, 5), quick_config())
            .value;
    const double b = solve_condenser(swapped, params, test_sampler(domain, 5),
                                     quick_config())
                         .value;
    CHECK(a == doctest::Approx(b).epsilon(1e-5));
}

TEST_CASE("growing F cannot shrink the capacity") {
    const Domain domain = Domain::make(8.0, 16);
    const CondenserSpec small = segment_pair_spec(domain, 1.0, 0.25, 0.5);
    MaskXX wide_f = small.f_mask;
    // widen the F segment by one node on each side of its row
    for (int iy = 0; iy < 16; ++iy) {
        for (int ix = 1; ix + 1 < 16; ++ix) {
            if (small.f_mask(ix, iy)) {
                wide_f(ix - 1, iy) = true;
                wide_f(ix + 1, iy) = true;
            }
        }
    }
    const CondenserSpec big = CondenserSpec::make(
        domain, small.e_mask, wide_f, small.ball_center, small.ball_radius);
    const BesovParams params = BesovParams::make(0.5, 2.0);
    const double v_small = solve_condenser(small, params,
                                           test_sampler(domain, 5),
                                           quick_config(300))
                               .value;
    const double v_big = solve_condenser(big, params, test_sampler(domain, 5),
                                         quick_config(300))
                             .value;
    CHECK(v_big >= v_small * (1.0 - 1e-6));
}

TEST_CASE("capacity is stable under refinement and geometric scaling") {
    const BesovParams params = BesovParams::make(0.5, 2.0);

    const Domain coarse = Domain::make(8.0, 16);
    const Domain fine = Domain::make(8.0, 32);
    const double v_coarse =
        solve_condenser(segment_pair_spec(coarse, 1.0, 0.5, 0.5), params,
                        test_sampler(coarse, 5), quick_config())
            .value;
    const double v_fine =
        solve_condenser(segment_pair_spec(fine, 1.0, 0.5, 0.5), params,
                        test_sampler(fine, 5), quick_config())
            .value;
    CHECK(v_fine / v_coarse > 0.5);
    CHECK(v_fine / v_coarse < 2.0);

    // doubling every condenser length at fixed spacing moves the value
    // by at most 25% at the scaling-invariant index
    const Domain domain = Domain::make(8.0, 48);
    const double v_one =
        solve_condenser(segment_pair_spec(domain, 0.75, 0.5, 0.4), params,
                        test_sampler(domain, 5), quick_config())
            .value;
    const double v_two =
        solve_condenser(segment_pair_spec(domain, 1.5, 0.5, 0.8), params,
                        test_sampler(domain, 5), quick_config())
            .value;
    CHECK(std::abs(v_two - v_one) <= 0.25 * v_one);
}

TEST_CASE("warm starts only descend") {
    const Domain domain = Domain::make(8.0, 16);
    const CondenserSpec spec = segment_pair_spec(domain, 1.0, 0.5, 0.5);
    const BesovParams params = BesovParams::make(0.5, 2.0);
    const OffsetSampler sampler = test_sampler(domain, 5);
    const SolveResult cold = solve_condenser(spec, params, sampler,
                                             quick_config());
    const SolveResult warm =
        solve_condenser(spec, params, sampler, quick_config(), cold.u);
    CHECK(warm.value <= cold.value * (1.0 + 1e-12));
}

TEST_CASE("lower sweep fits a slope over converged entries") {
    // N = 32 so the requested lambdas snap to at least two distinct
    // realized plate widths and the log-log fit is defined
    const Domain domain = Domain::make(8.0, 32);
    const BesovParams params = BesovParams::make(0.5, 2.0);
    const CapacityLowerReport report =
        verify_capacity_lower({0.25, 0.5, 1.0}, params, domain, 1.0, 0.5,
                              test_sampler(domain, 5), quick_config(300, 1e-4));
    REQUIRE(report.entries.size() == 3);
    CHECK(report.floor_value > 0.0);
    CHECK(std::isfinite(report.slope));
    for (const auto& entry : report.entries) {
        CHECK(entry.value > 0.0);
    }
}

TEST_CASE("upper table keeps the solver below its warm start") {
    const Domain domain = Domain::make(8.0, 32);
    const BesovParams params = BesovParams::make(0.5, 2.0);
    const CapacityUpperReport report =
        verify_capacity_upper({2.0, 8.0}, params, domain,
                              test_sampler(domain, 5), quick_config());
    REQUIRE(report.entries.size() == 2);
    for (const auto& entry : report.entries) {
        CHECK(entry.solver_value <= entry.construction_value * (1.0 + 1e-12));
        CHECK(entry.solver_value > 0.0);
    }
    CHECK(report.entries[0].solver_value > report.entries[1].solver_value);
}

TEST_CASE("qc-check separates the identity from the quadratic stretch") {
    const Domain domain = Domain::make(8.0, 32);
    const BesovParams params = BesovParams::make(0.5, 2.0);
    const QcCheckReport id_report =
        qc_check(identity_map(), params, 1500, 21, domain);
    CHECK(id_report.verdict == "bi-Lipschitz-like");
    CHECK(id_report.census.bins() <= 3);

    const QcCheckReport stretch_report =
        qc_check(radial_stretch(2.0), params, 1500, 21, domain);
    CHECK(stretch_report.verdict == "QC-not-biLipschitz-like");
    CHECK(stretch_report.census.bins() >= 5);

    CHECK_THROWS_AS(qc_check(identity_map(), params, 500, 21, domain),
                    ValidationError);
}
