#include "thzqi/biphoton.hpp"

#include <cmath>
#include <stdexcept>

#include "thzqi/qmc.hpp"

namespace thzqi::biphoton {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

PairDistributionParams PairDistributionParams::from(
    const optics::OpticalConfig& cfg)
{
    const double lambda_sum = cfg.lambda_vis + cfg.lambda_thz;
    PairDistributionParams p;
    p.sigma_diff = std::sqrt(cfg.crystal_length * lambda_sum / (8.0 * kPi));
    p.sigma_pump = 0.5 * cfg.pump_waist;
    return p;
}

double transition_probability(const TransversePoint& rho_vis,
                              const TransversePoint& rho_thz,
                              const optics::OpticalConfig& cfg)
{
    const double lambda_sum = cfg.lambda_vis + cfg.lambda_thz;
    const double wp2 = cfg.pump_waist * cfg.pump_waist;

    const double ux = rho_vis.x - rho_thz.x;
    const double uy = rho_vis.y - rho_thz.y;
    const double diff2 = ux * ux + uy * uy;

    const double px = cfg.lambda_thz * rho_vis.x - cfg.lambda_vis * rho_thz.x;
    const double py = cfg.lambda_thz * rho_vis.y - cfg.lambda_vis * rho_thz.y;
    const double pump2 = px * px + py * py;

    const double prefactor =
        8.0 / (kPi * cfg.crystal_length * wp2 * lambda_sum);
    const double e_diff =
        std::exp(-4.0 * kPi * diff2 / (cfg.crystal_length * lambda_sum));
    const double e_pump =
        std::exp(-2.0 * pump2 / (wp2 * lambda_sum * lambda_sum));
    return prefactor * e_diff * e_pump;
}

double analytic_normalization(const optics::OpticalConfig& cfg)
{
    const double lambda_sum = cfg.lambda_vis + cfg.lambda_thz;
    const double lambda_diff = cfg.lambda_thz - cfg.lambda_vis;
    const double r = lambda_sum / lambda_diff;
    return r * r;
}

std::vector<PairSample> qmc_pair_samples(std::size_t n,
                                         const optics::OpticalConfig& cfg,
                                         std::uint64_t sequence_offset)
{
    if (n < 1)
        throw std::invalid_argument("qmc_pair_samples: n must be >= 1");

    const auto dist = PairDistributionParams::from(cfg);
    const double lambda_sum = cfg.lambda_vis + cfg.lambda_thz;
    const double lambda_diff = cfg.lambda_thz - cfg.lambda_vis;

    static constexpr std::uint32_t bases[4] = {2, 3, 5, 7};
    std::vector<PairSample> out(n);
    double u[4];
    for (std::size_t i = 0; i < n; ++i) {
        qmc::halton_point(sequence_offset + i + 1, bases, 4, u);
        // difference coordinate (rho_vis - rho_thz)
        const double dx = dist.sigma_diff * qmc::inverse_normal_cdf(u[0]);
        const double dy = dist.sigma_diff * qmc::inverse_normal_cdf(u[1]);
        // pump-weighted coordinate
        const double px = dist.sigma_pump * qmc::inverse_normal_cdf(u[2]);
        const double py = dist.sigma_pump * qmc::inverse_normal_cdf(u[3]);
        // invert u = rho_vis - rho_thz, w = (l_T rho_vis - l_V rho_thz)/L
        PairSample& s = out[i];
        s.rho_vis.x = (lambda_sum * px - cfg.lambda_vis * dx) / lambda_diff;
        s.rho_vis.y = (lambda_sum * py - cfg.lambda_vis * dy) / lambda_diff;
        s.rho_thz.x = (lambda_sum * px - cfg.lambda_thz * dx) / lambda_diff;
        s.rho_thz.y = (lambda_sum * py - cfg.lambda_thz * dy) / lambda_diff;
        s.weight = 1.0;
    }
    return out;
}

namespace {

// Trapezoid quadrature of P over the 4D box [-e, e]^4 with m points per axis.
double quadrature(const optics::OpticalConfig& cfg, double extent, int m)
{
    const double h = 2.0 * extent / static_cast<double>(m - 1);
    double total = 0.0;
#pragma omp parallel for reduction(+ : total) schedule(static)
    for (int ivx = 0; ivx < m; ++ivx) {
        const double vx = -extent + h * ivx;
        const double wvx = (ivx == 0 || ivx == m - 1) ? 0.5 : 1.0;
        for (int itx = 0; itx < m; ++itx) {
            const double tx = -extent + h * itx;
            const double wtx = (itx == 0 || itx == m - 1) ? 0.5 : 1.0;
            // The x and y factors of P are identical in form; evaluating the
            // full 4D integrand keeps this an end-to-end check of the
            // implementation rather than of a factored shortcut.
            for (int ivy = 0; ivy < m; ++ivy) {
                const double vy = -extent + h * ivy;
                const double wvy = (ivy == 0 || ivy == m - 1) ? 0.5 : 1.0;
                double row = 0.0;
                for (int ity = 0; ity < m; ++ity) {
                    const double ty = -extent + h * ity;
                    const double wty = (ity == 0 || ity == m - 1) ? 0.5 : 1.0;
                    row += wty * transition_probability({vx, vy}, {tx, ty},
                                                        cfg);
                }
                total += wvx * wtx * wvy * row;
            }
        }
    }
    return total * h * h * h * h;
}

}  // namespace

double normalization_check(const optics::OpticalConfig& cfg,
                           double grid_extent, int grid_points)
{
    if (grid_points < 9)
        throw std::invalid_argument("normalization_check: too few grid points");

    // the widest per-axis std among the four coordinates
    const auto dist = PairDistributionParams::from(cfg);
    const double lambda_sum = cfg.lambda_vis + cfg.lambda_thz;
    const double lambda_diff = cfg.lambda_thz - cfg.lambda_vis;
    const double a = lambda_sum / lambda_diff;
    const double b_thz = cfg.lambda_thz / lambda_diff;
    const double sigma_max =
        std::sqrt(a * a * dist.sigma_pump * dist.sigma_pump +
                  b_thz * b_thz * dist.sigma_diff * dist.sigma_diff);
    if (grid_extent < 6.0 * sigma_max)
        throw std::invalid_argument(
            "normalization_check: grid_extent below 6 sigma");

    const double coarse = quadrature(cfg, grid_extent, (grid_points + 1) / 2);
    const double fine = quadrature(cfg, grid_extent, grid_points);
    if (std::abs(fine - coarse) > 0.005 * std::abs(fine))
        throw GridTooCoarse{};
    return fine;
}

}  // namespace thzqi::biphoton
