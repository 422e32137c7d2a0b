#pragma once

#include <cstddef>
#include <cstdint>

namespace thzqi::qmc {

/// Radical inverse (van der Corput digit reversal) of `index` in the given
/// prime base. Returns a value in [0, 1).
double radical_inverse(std::uint64_t index, std::uint32_t base);

/// Writes the `dim`-dimensional Halton point for `index` into `out`.
/// Index 0 maps to the all-zero corner, so callers should start at index 1.
void halton_point(std::uint64_t index, const std::uint32_t* bases, int dim,
                  double* out);

/// Inverse CDF of the standard normal distribution.
/// Accurate to ~1e-14 relative over (0, 1); throws std::domain_error outside.
double inverse_normal_cdf(double p);

/// Counter-based pseudo-random generator used where a value must depend only
/// on a set of integer coordinates (pixel, frame, ...) and not on evaluation
/// order. SplitMix64 finalizer chain.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

/// Uniform double in (0,1) from a 64-bit hash state.
double hash_to_unit(std::uint64_t h);

/// Standard normal deviate derived from two hashed uniforms (Box-Muller).
double hash_to_normal(std::uint64_t h);

}  // namespace thzqi::qmc
