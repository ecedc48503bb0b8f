#pragma once

#include <cstdint>
#include <random>

namespace besovlab::detail {

/// Uniform double in [0,1) with pinned bit-for-bit semantics across
/// platforms (standard distributions are implementation-defined).
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace besovlab::detail
