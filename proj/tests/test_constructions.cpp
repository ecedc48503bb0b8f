#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "besovlab/bump_norm.hpp"
#include "besovlab/constructions.hpp"
#include "besovlab/grid.hpp"
#include "besovlab/types.hpp"

using namespace besovlab;

TEST_CASE("harmonic stack profile hits its exact values") {
    // sigma = 1/4: j = 0 gives 3/4, j = 1 gives 1/2 * 1/2, later terms vanish
    CHECK(harmonic_stack_profile(0.25, 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(harmonic_stack_profile(0.25, 16) ==
          doctest::Approx(1.0).epsilon(1e-15));

    // independent sum for sigma = 2^-10
    const double sigma = std::pow(2.0, -10.0);
    double oracle = 0.0;
    for (int j = 0; j < 16; ++j) {
        oracle += std::max(0.0, 1.0 - std::pow(2.0, j) * sigma) / (j + 1);
    }
    CHECK(harmonic_stack_profile(sigma, 16) ==
          doctest::Approx(oracle).epsilon(1e-14));

    // harmonic half lower bound: profile >= H_10 / 2 = 1.4644...
    CHECK(harmonic_stack_profile(sigma, 16) >= 1.4644);
}

TEST_CASE("harmonic stack profile decreases strictly in sigma") {
    double prev = harmonic_stack_profile(1e-3, 16);
    for (double sigma : {1e-2, 0.1, 0.3, 0.6, 0.9}) {
        const double value = harmonic_stack_profile(sigma, 16);
        CHECK(value < prev);
        prev = value;
    }
    CHECK(harmonic_stack_profile(1.0, 16) == 0.0);
}

TEST_CASE("concentric dyadic stack evaluates to the amplitude sum at 0") {
    const Domain domain = Domain::make(8.0, 32);
    std::vector<double> amplitudes;
    for (int j = 0; j < 8; ++j) amplitudes.push_back(1.0 / (j + 1));
    const StackResult stack = make_dyadic_stack({Vec2::Zero()}, 1.0, amplitudes,
                                                StackMode::concentric, domain);
    CHECK(stack.family.evaluate(Vec2::Zero()) ==
          doctest::Approx(2.7178571428571425).epsilon(1e-15));
    CHECK(stack.family.size() == 8);
    CHECK(stack.family.radii.front() == doctest::Approx(1.0));
    CHECK(stack.family.radii.back() == doctest::Approx(1.0 / 128.0));
    stack.field.validate_support();
}

TEST_CASE("concentric collapse keeps the additive profile") {
    const Domain domain = Domain::make(8.0, 32);
    const StackResult stack = make_dyadic_stack(
        {Vec2::Zero()}, 1.0, {1.0, 0.5, 0.25}, StackMode::concentric, domain);
    const BumpSpec spec = concentric_radial_spec(stack.family);
    CHECK(spec.extent == doctest::Approx(1.0));
    CHECK(spec.profile(0.0) == doctest::Approx(1.75).epsilon(1e-15));
    // at r = 0.3 the first two tents contribute: 0.7 + 0.5 * 0.4 = 0.9
    CHECK(spec.profile(0.3) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("concentric collapse rejects scattered centers") {
    BumpFamily family;
    family.centers = {Vec2::Zero(), Vec2(0.5, 0.0)};
    family.radii = {1.0, 0.5};
    family.amplitudes = {1.0, 1.0};
    CHECK_THROWS_AS(concentric_radial_spec(family), ValidationError);
}

TEST_CASE("equal-radius self-interactions factor through the amplitude") {
    // W_j(tau) = b_j^p W_unit(tau) exactly for equal radii
    const double radius = 0.2, b = 1.7, p = 4.0;
    BumpSpec unit;
    unit.center = Vec2::Zero();
    unit.extent = radius;
    unit.profile = [radius](double r) {
        return std::max(0.0, 1.0 - r / radius);
    };
    BumpSpec scaled = unit;
    scaled.profile = [radius, b](double r) {
        return b * std::max(0.0, 1.0 - r / radius);
    };
    for (double tau : {0.01, 0.1, 0.25, 0.6}) {
        CHECK(bump_self_w(scaled, tau, p) ==
              doctest::Approx(std::pow(b, p) * bump_self_w(unit, tau, p))
                  .epsilon(1e-12));
    }
}

TEST_CASE("equal stack rejects 9-dilated overlaps naming the pair") {
    const Domain domain = Domain::make(8.0, 32);
    CHECK_NOTHROW(make_equal_stack({Vec2(-1.0, 0.0), Vec2(1.0, 0.0)}, 0.1,
                                   {1.0, 1.0}, domain));
    CHECK_THROWS_WITH_AS(
        make_equal_stack({Vec2(-0.5, 0.0), Vec2(0.5, 0.0)}, 0.1, {1.0, 1.0},
                         domain),
        doctest::Contains("0"), ValidationError);
}

TEST_CASE("stack construction validates amplitudes") {
    const Domain domain = Domain::make(8.0, 32);
    CHECK_THROWS_AS(make_dyadic_stack({Vec2::Zero()}, 1.0, {1.0, -0.5},
                                      StackMode::concentric, domain),
                    ValidationError);
    CHECK_THROWS_AS(make_dyadic_stack({Vec2::Zero()}, 1.0, {},
                                      StackMode::concentric, domain),
                    ValidationError);
}

TEST_CASE("dyadic disjoint mode enforces separation too") {
    const Domain domain = Domain::make(8.0, 32);
    CHECK_THROWS_AS(
        make_dyadic_stack({Vec2(-0.3, 0.0), Vec2(0.3, 0.0)}, 0.5, {1.0, 1.0},
                          StackMode::disjoint, domain),
        ValidationError);
}

TEST_CASE("annulus condenser is exact on both plates") {
    const Domain domain = Domain::make(8.0, 64);
    const Vec2 x0 = Vec2::Zero();
    const double r = 0.25, R = 2.0;
    const CondenserFunction u = make_annulus_condenser(x0, r, R, 16, domain);
    CHECK(u.inner == r);
    CHECK(u.outer == R);
    int inner_nodes = 0, outer_nodes = 0;
    for (int ix = 0; ix < domain.resolution; ++ix) {
        for (int iy = 0; iy < domain.resolution; ++iy) {
            const double rho = (domain.node(ix, iy) - x0).norm();
            if (rho <= r) {
                CHECK(u.field.values(ix, iy) == 1.0);
                ++inner_nodes;
            } else if (rho >= R) {
                CHECK(u.field.values(ix, iy) == 0.0);
                ++outer_nodes;
            } else {
                CHECK(u.field.values(ix, iy) >= 0.0);
                CHECK(u.field.values(ix, iy) <= 1.0);
            }
        }
    }
    CHECK(inner_nodes > 0);
    CHECK(outer_nodes > 0);

    // radial profile non-increasing
    double prev = u.radial(0.0);
    for (double rho = 0.05; rho <= R + 0.5; rho += 0.05) {
        const double value = u.radial(rho);
        CHECK(value <= prev + 1e-12);
        prev = value;
    }
}

TEST_CASE("annulus condenser validates its geometry") {
    const Domain domain = Domain::make(8.0, 32);
    CHECK_THROWS_AS(make_annulus_condenser(Vec2::Zero(), 1.0, 0.5, 16, domain),
                    ValidationError);
    CHECK_THROWS_AS(make_annulus_condenser(Vec2::Zero(), 0.5, 3.0, 16, domain),
                    ValidationError);
}

TEST_CASE("unit stack norm is independent of the outer radius") {
    const BesovParams params = BesovParams::make(0.5, 2.0);
    const double at_half = concentric_unit_stack_norm(params, 0.5, 12);
    const double at_one = concentric_unit_stack_norm(params, 1.0, 12);
    CHECK(at_half > 0.0);
    CHECK(at_half == doctest::Approx(at_one).epsilon(1e-9));
}

TEST_CASE("annulus norm profile decreases in the radius ratio") {
    const BesovParams params = BesovParams::make(0.5, 2.0);
    const Domain domain = Domain::make(8.0, 32);
    const auto profile = annulus_norm_profile({2.0, 4.0, 8.0}, params, domain);
    REQUIRE(profile.size() == 3);
    CHECK(profile[0].first == doctest::Approx(2.0));
    for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
        CHECK(profile[i].second > profile[i + 1].second);
        CHECK(profile[i + 1].second > 0.0);
    }
}

TEST_CASE("anisotropic box has exact plateau and validated geometry") {
    const Domain domain = Domain::make(8.0, 64);
    const GridFunction box = make_anisotropic_box(0.25, 1.0, domain);
    box.validate_support();
    // center node lies in the plateau
    const int c = domain.resolution / 2;
    CHECK(box.values(c, c) == 1.0);
    CHECK_THROWS_AS(make_anisotropic_box(1.5, 1.0, domain), ValidationError);
    CHECK_THROWS_AS(make_anisotropic_box(1.0, 2.0, domain), ValidationError);
}
