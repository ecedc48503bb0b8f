#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "besovlab/offset_sampler.hpp"
#include "besovlab/types.hpp"

using namespace besovlab;

namespace {

std::int64_t count_annulus(const Domain& domain, double lo, double hi) {
    const double spacing = domain.spacing();
    const int reach = static_cast<int>(std::ceil(hi / spacing)) + 1;
    std::int64_t count = 0;
    for (int di = -reach; di <= reach; ++di) {
        for (int dj = -reach; dj <= reach; ++dj) {
            if (di == 0 && dj == 0) continue;
            const double dist = std::hypot(di, dj) * spacing;
            if (dist >= lo && dist < hi) ++count;
        }
    }
    return count;
}

}  // namespace

TEST_CASE("levels partition dyadic annuli with exact weights") {
    const Domain domain = Domain::make(8.0, 64);
    const double outer = 4.0;
    const OffsetSampler sampler = build_offset_sampler(domain, outer, 5, 32, 7);
    CHECK(sampler.outer_radius == outer);
    CHECK(!sampler.levels.empty());

    const double spacing = domain.spacing();
    for (const OffsetLevel& level : sampler.levels) {
        const double hi = outer * std::pow(2.0, -level.k);
        const double lo = hi / 2.0;
        for (const auto& [di, dj] : level.offsets) {
            const double dist = std::hypot(di, dj) * spacing;
            CHECK(dist >= lo);
            CHECK(dist < hi);
        }
        CHECK(level.annulus_count == count_annulus(domain, lo, hi));
        // weight * |offsets| equals the annulus lattice measure
        CHECK(level.weight * static_cast<double>(level.offsets.size()) ==
              doctest::Approx(static_cast<double>(level.annulus_count) *
                              spacing * spacing)
                  .epsilon(1e-12));
        CHECK(std::is_sorted(level.offsets.begin(), level.offsets.end()));
    }
}

TEST_CASE("rebuilding with the same seed is identical") {
    const Domain domain = Domain::make(8.0, 64);
    const OffsetSampler a = build_offset_sampler(domain, 4.0, 5, 16, 42);
    const OffsetSampler b = build_offset_sampler(domain, 4.0, 5, 16, 42);
    REQUIRE(a.levels.size() == b.levels.size());
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        CHECK(a.levels[i].k == b.levels[i].k);
        CHECK(a.levels[i].offsets == b.levels[i].offsets);
        CHECK(a.levels[i].weight == b.levels[i].weight);
    }
}

TEST_CASE("a large sample budget turns every level exhaustive") {
    const Domain domain = Domain::make(8.0, 16);
    const OffsetSampler sampler =
        build_offset_sampler(domain, 4.0, 4, 1000000, 3);
    for (const OffsetLevel& level : sampler.levels) {
        CHECK(static_cast<std::int64_t>(level.offsets.size()) ==
              level.annulus_count);
        CHECK(level.weight ==
              doctest::Approx(domain.spacing() * domain.spacing())
                  .epsilon(1e-12));
    }
}

TEST_CASE("annuli below the lattice spacing are dropped with a warning") {
    const Domain domain = Domain::make(8.0, 8);  // spacing 1
    const OffsetSampler sampler = build_offset_sampler(domain, 4.0, 6, 8, 1);
    // levels k >= 3 cover |h| < 0.5 < spacing and hold no offsets
    for (const OffsetLevel& level : sampler.levels) {
        CHECK(!level.offsets.empty());
    }
    CHECK(!sampler.warnings.empty());
}

TEST_CASE("sampler rejects invalid shapes") {
    const Domain domain = Domain::make(8.0, 16);
    CHECK_THROWS_AS(build_offset_sampler(domain, 0.0, 4, 8, 1),
                    ValidationError);
    CHECK_THROWS_AS(build_offset_sampler(domain, 4.0, 0, 8, 1),
                    ValidationError);
    CHECK_THROWS_AS(build_offset_sampler(domain, 4.0, 4, 0, 1),
                    ValidationError);
}

TEST_CASE("bounded_uint stays in range and is deterministic") {
    std::mt19937_64 rng(99);
    std::mt19937_64 rng2(99);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t v = detail::bounded_uint(rng, 17);
        CHECK(v < 17);
        CHECK(v == detail::bounded_uint(rng2, 17));
    }
}
