#include "besovlab/offset_sampler.hpp"

#include <algorithm>
#include <cmath>

namespace besovlab {

namespace detail {

std::uint64_t bounded_uint(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw ValidationError("bounded_uint: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

}  // namespace detail

OffsetSampler build_offset_sampler(const Domain& domain, double outer_radius,
                                   int level_count, int samples_per_level,
                                   std::uint64_t seed) {
    if (!(outer_radius > 0.0) || outer_radius > domain.side_length) {
        throw ValidationError("build_offset_sampler: outer_radius must lie in (0, side_length]");
    }
    if (level_count < 1) {
        throw ValidationError("build_offset_sampler: level_count must be >= 1");
    }
    if (samples_per_level < 4) {
        throw ValidationError("build_offset_sampler: samples_per_level must be >= 4");
    }

    const double h = domain.spacing();
    const int n = domain.resolution;
    OffsetSampler sampler;
    sampler.outer_radius = outer_radius;
    sampler.seed = seed;

    // Annulus bounds share one expression so adjacent levels partition exactly.
    auto bound = [&](int k) { return outer_radius * std::exp2(-k); };

    for (int k = 0; k < level_count; ++k) {
        const double hi = bound(k), lo = bound(k + 1);
        // Offsets live on the lattice h * (di, dj); enumerate the bounding square.
        const int dmax = std::min<int>(n - 1, static_cast<int>(std::ceil(hi / h)));
        OffsetLevel level;
        level.k = k;
        for (int di = -dmax; di <= dmax; ++di) {
            for (int dj = -dmax; dj <= dmax; ++dj) {
                if (di == 0 && dj == 0) continue;
                const double r = std::hypot(di, dj) * h;
                if (r >= lo && r < hi) level.offsets.emplace_back(di, dj);
            }
        }
        level.annulus_count = static_cast<std::int64_t>(level.offsets.size());
        if (level.annulus_count == 0) {
            sampler.warnings.push_back("level " + std::to_string(k) +
                                       " dropped: annulus [" + std::to_string(lo) +
                                       ", " + std::to_string(hi) +
                                       ") holds no lattice offsets");
            continue;
        }
        if (level.annulus_count > samples_per_level) {
            // Partial Fisher-Yates with a per-level stream: the subsample for
            // level k is independent of every other level's annulus size.
            std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * (k + 1)));
            auto& offs = level.offsets;
            for (int i = 0; i < samples_per_level; ++i) {
                const auto j = i + detail::bounded_uint(rng, offs.size() - i);
                std::swap(offs[i], offs[j]);
            }
            offs.resize(samples_per_level);
        }
        std::sort(level.offsets.begin(), level.offsets.end());
        // count/size == 1.0 exactly in the exhaustive case, so the weight
        // degenerates to the plain lattice measure spacing^2.
        level.weight = (h * h) * (static_cast<double>(level.annulus_count) /
                                  static_cast<double>(level.offsets.size()));
        sampler.levels.push_back(std::move(level));
    }
    return sampler;
}

}  // namespace besovlab
