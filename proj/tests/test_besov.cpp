#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "besovlab/besov.hpp"
#include "besovlab/grid.hpp"
#include "besovlab/offset_sampler.hpp"
#include "besovlab/types.hpp"
#include "corpus.hpp"

using namespace besovlab;

namespace {

OffsetSampler exhaustive_sampler(const Domain& domain, double outer) {
    const int levels =
        static_cast<int>(std::ceil(std::log2(outer / domain.spacing()))) + 1;
    return build_offset_sampler(domain, outer, levels, 1 << 24, 1);
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(BesovParams::make(0.0, 2.0), ValidationError);
    CHECK_THROWS_AS(BesovParams::make(1.0, 2.0), ValidationError);
    CHECK_THROWS_AS(BesovParams::make(0.5, 0.5), ValidationError);
    // p must exceed n/(n+s) = 2/2.5 = 0.8
    CHECK_THROWS_AS(BesovParams::make(0.5, 2.0, 0.7), ValidationError);

    const BesovParams invariant = BesovParams::make(0.5, 2.0);
    CHECK(invariant.scaling_invariant);
    CHECK(invariant.p() == doctest::Approx(4.0));

    const BesovParams overridden = BesovParams::make(0.5, 2.0, 3.0);
    CHECK(!overridden.scaling_invariant);
    CHECK(overridden.p() == doctest::Approx(3.0));

    const BesovParams sup = BesovParams::make(0.5, kInfinity);
    CHECK(std::isinf(sup.q));
}

TEST_CASE("sampled tent has the analytic L2 mass") {
    const Domain domain = Domain::make(8.0, 128);
    const GridFunction f = sample(
        [](const Vec2& x) { return std::max(0.0, 1.0 - x.norm()); }, domain,
        1.0);
    // integral of (1-r)^2 over the unit disk = pi/6
    const double exact = std::sqrt(std::numbers::pi / 6.0);
    CHECK(lp_norm(f, 2.0) == doctest::Approx(exact).epsilon(2e-2));
}

TEST_CASE("difference kernel and far tail match their formulas") {
    const BesovParams params = BesovParams::make(0.5, 2.0);
    // kernel = dist^(-qs - n) = dist^(-3)
    CHECK(detail::difference_kernel(2.0, params) ==
          doctest::Approx(std::pow(2.0, -3.0)).epsilon(1e-14));
    // tail = (2^(1/p) lp)^q * 2 pi T^(-qs) / (qs)
    const double lp = 0.7, T = 4.0;
    const double expected = std::pow(std::pow(2.0, 0.25) * lp, 2.0) * 2.0 *
                            std::numbers::pi * std::pow(T, -1.0) / 1.0;
    CHECK(detail::difference_tail_qpow(lp, T, params) ==
          doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("estimator equals the exhaustive oracle") {
    const Domain domain = Domain::make(8.0, 12);
    const OffsetSampler sampler = exhaustive_sampler(domain, 4.0);
    for (const auto& entry : testing::corpus()) {
        const GridFunction f = sample(entry.fn, domain, entry.support);
        for (const BesovParams& params :
             {BesovParams::make(0.5, 2.0), BesovParams::make(0.6, 3.0)}) {
            const double est = besov_norm_difference(f, params, sampler);
            const double oracle = besov_norm_oracle(f, params);
            CHECK(est == doctest::Approx(oracle).epsilon(1e-10));
        }
    }
}

TEST_CASE("oracle rejects oversized grids") {
    const Domain domain = Domain::make(8.0, 64);
    const GridFunction f = sample(
        [](const Vec2& x) { return std::max(0.0, 1.0 - x.norm()); }, domain,
        1.0);
    CHECK_THROWS_AS(besov_norm_oracle(f, BesovParams::make(0.5, 2.0)),
                    ValidationError);
}

TEST_CASE("norm is absolutely homogeneous to machine precision") {
    const Domain domain = Domain::make(8.0, 16);
    const OffsetSampler sampler = exhaustive_sampler(domain, 4.0);
    const BesovParams params = BesovParams::make(0.5, 2.0);
    const GridFunction f = sample(
        [](const Vec2& x) { return std::max(0.0, 1.0 - x.norm()); }, domain,
        1.0);
    GridFunction g = f;
    g.values *= 3.25;
    const double n_f = besov_norm_difference(f, params, sampler);
    const double n_g = besov_norm_difference(g, params, sampler);
    CHECK(n_g == doctest::Approx(3.25 * n_f).epsilon(1e-12));
}

TEST_CASE("missing support radius rejects the tail correction") {
    const Domain domain = Domain::make(8.0, 16);
    const OffsetSampler sampler = exhaustive_sampler(domain, 4.0);
    GridFunction f = sample(
        [](const Vec2& x) { return std::max(0.0, 1.0 - x.norm()); }, domain);
    CHECK(!f.support_radius.has_value());
    CHECK_THROWS_AS(
        besov_norm_difference(f, BesovParams::make(0.5, 2.0), sampler),
        ValidationError);
}

TEST_CASE("sup aggregation matches a direct scan of the profile") {
    const Domain domain = Domain::make(8.0, 12);
    const BesovParams sup = BesovParams::make(0.5, kInfinity);
    const GridFunction f = sample(
        [](const Vec2& x) { return std::max(0.0, 1.0 - x.norm()); }, domain,
        1.0);
    const DifferenceProfile profile = difference_profile(f, sup.p(), exhaustive_sampler(domain, 4.0));
    double manual = 0.0;
    for (const auto& level : profile.levels) {
        for (const auto& term : level.terms) {
            manual = std::max(manual,
                              std::pow(term.dist, -sup.s) * term.inner);
        }
    }
    // far boundary: |h| = T contributes T^(-s) * 2^(1/p) * lp_f
    manual = std::max(manual, std::pow(profile.outer_radius, -sup.s) *
                                  std::pow(2.0, 1.0 / sup.p()) * profile.lp_f);
    CHECK(aggregate_difference(profile, sup) ==
          doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("oscillation and gradient estimators track the difference norm") {
    const Domain domain = Domain::make(8.0, 48);
    const BesovParams params = BesovParams::make(0.5, 2.0);
    const GridFunction f = sample(
        [](const Vec2& x) { return std::max(0.0, 1.0 - x.norm()); }, domain,
        1.0);
    const OffsetSampler sampler = build_offset_sampler(domain, 4.0, 5, 32, 11);
    const double diff = besov_norm_difference(f, params, sampler);

    const auto osc_profile =
        oscillation_profile(f, params, default_oscillation_scales(domain));
    const double osc = besov_norm_from_oscillation(osc_profile, params);

    const auto grad =
        hajlasz_halfsup_gradient(f, params, default_hajlasz_levels(domain));
    const double haj = hajlasz_upper_bound(grad, params);

    CHECK(diff > 0.0);
    CHECK(osc > 0.0);
    CHECK(haj > 0.0);
    CHECK(osc / diff > 0.1);
    CHECK(osc / diff < 10.0);
    CHECK(haj / diff > 0.1);
    CHECK(haj / diff < 10.0);
}

TEST_CASE("hajlasz bound is monotone non-increasing in q") {
    const Domain domain = Domain::make(8.0, 32);
    const GridFunction f = sample(
        [](const Vec2& x) { return std::max(0.0, 1.0 - x.norm()); }, domain,
        1.0);
    const BesovParams q2 = BesovParams::make(0.5, 2.0);
    const BesovParams q4 = BesovParams::make(0.5, 4.0);
    const BesovParams qi = BesovParams::make(0.5, kInfinity);
    const auto grad =
        hajlasz_halfsup_gradient(f, q2, default_hajlasz_levels(domain));
    const double b2 = hajlasz_upper_bound(grad, q2);
    const double b4 = hajlasz_upper_bound(grad, q4);
    const double bi = hajlasz_upper_bound(grad, qi);
    CHECK(b2 >= b4);
    CHECK(b4 >= bi);
}
