#include "thzqi/qmc.hpp"

#include <cmath>
#include <stdexcept>

namespace thzqi::qmc {

double radical_inverse(std::uint64_t index, std::uint32_t base)
{
    const double inv_base = 1.0 / static_cast<double>(base);
    double scale = inv_base;
    double result = 0.0;
    while (index > 0) {
        result += static_cast<double>(index % base) * scale;
        index /= base;
        scale *= inv_base;
    }
    return result;
}

void halton_point(std::uint64_t index, const std::uint32_t* bases, int dim,
                  double* out)
{
    for (int d = 0; d < dim; ++d)
        out[d] = radical_inverse(index, bases[d]);
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z * 0.7071067811865476);
}

double normal_pdf(double z)
{
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

}  // namespace

double inverse_normal_cdf(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("inverse_normal_cdf: p must be in (0,1)");

    const bool upper = p > 0.5;
    const double q = upper ? 1.0 - p : p;  // q in (0, 0.5]

    // Starting guess: logistic approximation in the bulk, the classical
    // sqrt(-2 ln q) asymptote in the tail.
    double z;
    if (q > 0.02) {
        z = -std::log(1.0 / q - 1.0) / 1.702;
    } else {
        z = -std::sqrt(-2.0 * std::log(q));
        // one fixed-point pass of the tail expansion
        z = -std::sqrt(-2.0 * std::log(q) - std::log(-2.0 * std::log(q)) -
                       std::log(2.0 * 3.14159265358979323846) + 2.0 * std::log(-z));
    }

    // Newton on ln(Phi(z)) = ln(q); stable in the tail where Phi' ~ Phi * |z|.
    for (int it = 0; it < 50; ++it) {
        const double cdf = normal_cdf(z);
        if (cdf <= 0.0)
            break;
        const double step = (std::log(cdf) - std::log(q)) * cdf / normal_pdf(z);
        z -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(z)))
            break;
    }
    return upper ? -z : z;
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value)
{
    // SplitMix64 finalizer applied to the running state.
    std::uint64_t h = seed + 0x9e3779b97f4a7c15ULL + value;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    return h ^ (h >> 31);
}

double hash_to_unit(std::uint64_t h)
{
    // top 53 bits -> (0,1); offset by half a ulp so 0 is never produced
    return (static_cast<double>(h >> 11) + 0.5) * 0x1p-53;
}

double hash_to_normal(std::uint64_t h)
{
    const double u1 = hash_to_unit(h);
    const double u2 = hash_to_unit(hash_combine(h, 0x5bf0367552366a97ULL));
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace thzqi::qmc
