#pragma once

#include "besovlab/grid.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace besovlab {

// ============================================================================
// Stratified lattice-offset sampler for the difference seminorm
// ============================================================================

/// One dyadic annulus of lattice offsets h with
/// 2^{-k-1} * outer_radius <= |h| < 2^{-k} * outer_radius.
struct OffsetLevel {
    int k = 0;
    std::vector<std::pair<int, int>> offsets;  // sorted lexicographically
    double weight = 0.0;       // lattice measure of the annulus / |offsets|
    std::int64_t annulus_count = 0;  // total lattice offsets in the annulus
};

/**
 * Stratified sampler over dyadic offset annuli. Each level holds either the
 * full annulus (exhaustive) or a seeded uniform subsample; the weight makes
 * sum(weight * |offsets|) equal the annulus lattice measure exactly, so
 * quadratures are unbiased stratum by stratum.
 */
struct OffsetSampler {
    double outer_radius = 0.0;
    std::uint64_t seed = 0;
    std::vector<OffsetLevel> levels;
    std::vector<std::string> warnings;  // e.g. dropped empty levels
};

/**
 * Builds the sampler on a domain. Levels k = 0 .. level_count-1 partition
 * |h| in [outer_radius * 2^-level_count, outer_radius). Annuli narrower than
 * the lattice spacing come out empty and are dropped with a warning.
 *
 * Rebuilding with the same arguments gives an identical structure: the RNG
 * stream is derived from (seed, k) only.
 */
OffsetSampler build_offset_sampler(const Domain& domain, double outer_radius,
                                   int level_count, int samples_per_level,
                                   std::uint64_t seed);

namespace detail {

/// Unbiased uniform integer in [0, n) from a seeded 64-bit stream.
/// Standard distributions are implementation-defined; this is pinned.
std::uint64_t bounded_uint(std::mt19937_64& rng, std::uint64_t n);

}  // namespace detail

}  // namespace besovlab
