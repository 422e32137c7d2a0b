#include "thzqi/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace thzqi::fft {

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

void transform(std::vector<std::complex<double>>& a, bool inverse)
{
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft::transform: size must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * 3.14159265358979323846 / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& c : a)
            c *= inv_n;
    }
}

std::vector<double> real_magnitude_spectrum(const std::vector<double>& x,
                                            std::size_t padded_size)
{
    const std::size_t m = next_pow2(padded_size == 0 ? x.size() : padded_size);
    std::vector<std::complex<double>> buf(m, {0.0, 0.0});
    for (std::size_t i = 0; i < x.size() && i < m; ++i)
        buf[i] = {x[i], 0.0};
    transform(buf);
    std::vector<double> mag(m / 2 + 1);
    for (std::size_t k = 0; k <= m / 2; ++k)
        mag[k] = std::abs(buf[k]);
    return mag;
}

}  // namespace thzqi::fft
