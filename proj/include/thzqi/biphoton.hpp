#pragma once

#include <cstdint>
#include <vector>

#include "thzqi/optics.hpp"

namespace thzqi::biphoton {

/// Transverse coordinates in the crystal image plane, meters.
struct TransversePoint {
    double x = 0.0;
    double y = 0.0;
};

struct PairSample {
    TransversePoint rho_vis;
    TransversePoint rho_thz;
    double weight = 1.0;  // 1 for exact importance sampling
};

/// Widths of the two Gaussian factors of the pair distribution.
/// sigma_diff is the per-axis std of rho_vis - rho_thz; sigma_pump the
/// per-axis std of the pump-weighted coordinate
/// (lambda_thz*rho_vis - lambda_vis*rho_thz) / (lambda_vis + lambda_thz).
struct PairDistributionParams {
    double sigma_diff;
    double sigma_pump;

    static PairDistributionParams from(const optics::OpticalConfig& cfg);
};

/// Joint transition probability density for a signal/idler pair at the
/// given transverse positions, in 1/m^4. The pump-coordinate exponent uses
/// the squared pump waist so that the expression is dimensionally
/// consistent; its 4D integral is then (lambda_sum/lambda_diff)^2.
double transition_probability(const TransversePoint& rho_vis,
                              const TransversePoint& rho_thz,
                              const optics::OpticalConfig& cfg);

/// analytic value of the 4D integral of transition_probability
double analytic_normalization(const optics::OpticalConfig& cfg);

/// Deterministic low-discrepancy position-pair samples. A 4D Halton
/// sequence (bases 2,3,5,7, starting at index sequence_offset + 1) is mapped
/// through the inverse normal CDF of the difference and pump coordinates and
/// transformed back to (rho_vis, rho_thz). All weights are 1.
std::vector<PairSample> qmc_pair_samples(std::size_t n,
                                         const optics::OpticalConfig& cfg,
                                         std::uint64_t sequence_offset = 0);

struct GridTooCoarse : std::exception {
    const char* what() const noexcept override
    {
        return "normalization_check: quadrature grid too coarse "
               "(halving the step moves the result by more than 0.5%)";
    }
};

/// Brute-force 4D trapezoid quadrature of transition_probability over
/// [-grid_extent, grid_extent] per coordinate. grid_extent must cover at
/// least 6 sigma of every coordinate. Throws GridTooCoarse if the result is
/// not converged in step size.
double normalization_check(const optics::OpticalConfig& cfg,
                           double grid_extent = 3e-3, int grid_points = 96);

}  // namespace thzqi::biphoton
