#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace thzqi::fft {

std::size_t next_pow2(std::size_t n);

/// In-place iterative radix-2 transform. Size must be a power of two.
void transform(std::vector<std::complex<double>>& a, bool inverse = false);

/// Magnitude spectrum |X_k|, k = 0 .. padded_size/2, of a real signal
/// zero-padded to padded_size (rounded up to a power of two internally).
std::vector<double> real_magnitude_spectrum(const std::vector<double>& x,
                                            std::size_t padded_size);

}  // namespace thzqi::fft
