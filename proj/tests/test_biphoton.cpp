#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "thzqi/biphoton.hpp"
#include "thzqi/qmc.hpp"

using namespace thzqi;
using biphoton::TransversePoint;

namespace {

// independent evaluation of the pair-density prefactor 8/(pi L w_p^2 Lambda)
double prefactor(const optics::OpticalConfig& cfg)
{
    const double lam = cfg.lambda_vis + cfg.lambda_thz;
    return 8.0 / (M_PI * cfg.crystal_length * cfg.pump_waist *
                  cfg.pump_waist * lam);
}

}  // namespace

TEST_CASE("transition probability at characteristic points")
{
    optics::OpticalConfig cfg;

    // both exponentials are 1 at the origin
    const double p0 = biphoton::transition_probability({0, 0}, {0, 0}, cfg);
    CHECK(p0 == doctest::Approx(prefactor(cfg)).epsilon(1e-12));
    CHECK(p0 == doctest::Approx(1.62027e13).epsilon(1e-4));

    // equal positions: only the pump factor decays
    const double p1 =
        biphoton::transition_probability({1e-4, 0}, {1e-4, 0}, cfg);
    const double dl = cfg.lambda_thz - cfg.lambda_vis;
    const double lam = cfg.lambda_vis + cfg.lambda_thz;
    const double expo = 2.0 * dl * dl * 1e-8 /
                        (cfg.pump_waist * cfg.pump_waist * lam * lam);
    CHECK(expo == doctest::Approx(0.0252).epsilon(2e-3));
    CHECK(p1 == doctest::Approx(p0 * std::exp(-expo)).epsilon(1e-12));
    CHECK(p1 == doctest::Approx(1.57995e13).epsilon(1e-4));

    // 1 mm separation: the correlation factor dominates everything
    const double pt =
        biphoton::transition_probability({1.5e-3, 0}, {0.5e-3, 0}, cfg);
    CHECK(pt / p0 < 1e-26);
    CHECK(pt >= 0.0);
}

TEST_CASE("transition probability symmetry and maximum")
{
    optics::OpticalConfig cfg;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> pos(-1e-3, 1e-3);
    const double p0 = biphoton::transition_probability({0, 0}, {0, 0}, cfg);
    for (int i = 0; i < 200; ++i) {
        TransversePoint v{pos(rng), pos(rng)};
        TransversePoint t{v.x + pos(rng) * 0.1, v.y + pos(rng) * 0.1};
        const double a = biphoton::transition_probability(v, t, cfg);
        const double b = biphoton::transition_probability(
            {-v.x, -v.y}, {-t.x, -t.y}, cfg);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
        CHECK(a <= p0 * (1.0 + 1e-12));
    }
}

TEST_CASE("pair distribution widths")
{
    optics::OpticalConfig cfg;
    const auto d = biphoton::PairDistributionParams::from(cfg);
    CHECK(d.sigma_diff == doctest::Approx(89.35e-6).epsilon(1e-3));
    CHECK(d.sigma_pump == doctest::Approx(0.5 * cfg.pump_waist));
    CHECK(d.sigma_diff < d.sigma_pump);
}

TEST_CASE("qmc sample moments match the analytic gaussian factors")
{
    optics::OpticalConfig cfg;
    const std::size_t n = 1 << 14;
    const auto samples = biphoton::qmc_pair_samples(n, cfg);
    REQUIRE(samples.size() == n);

    double mvx = 0, mvy = 0, mtx = 0, mty = 0;
    for (const auto& s : samples) {
        mvx += s.rho_vis.x;
        mvy += s.rho_vis.y;
        mtx += s.rho_thz.x;
        mty += s.rho_thz.y;
        CHECK(s.weight == 1.0);
    }
    mvx /= n;
    mvy /= n;
    mtx /= n;
    mty /= n;

    // per-axis std of rho_vis is ~sigma_pump-scale; 3 sigma / sqrt(n) bound
    const auto d = biphoton::PairDistributionParams::from(cfg);
    const double bound = 3.0 * d.sigma_pump / std::sqrt(double(n));
    CHECK(std::abs(mvx) < bound);
    CHECK(std::abs(mvy) < bound);
    CHECK(std::abs(mtx) < bound);
    CHECK(std::abs(mty) < bound);

    double var_dx = 0, var_dy = 0;
    for (const auto& s : samples) {
        const double dx = s.rho_vis.x - s.rho_thz.x;
        const double dy = s.rho_vis.y - s.rho_thz.y;
        var_dx += dx * dx;
        var_dy += dy * dy;
    }
    const double sd_x = std::sqrt(var_dx / n);
    const double sd_y = std::sqrt(var_dy / n);
    CHECK(sd_x == doctest::Approx(d.sigma_diff).epsilon(0.02));
    CHECK(sd_y == doctest::Approx(d.sigma_diff).epsilon(0.02));
}

TEST_CASE("position correlation against a plain monte carlo oracle")
{
    optics::OpticalConfig cfg;
    const auto d = biphoton::PairDistributionParams::from(cfg);
    const double lam = cfg.lambda_vis + cfg.lambda_thz;
    const double dl = cfg.lambda_thz - cfg.lambda_vis;

    // oracle: 10^6 independent normal draws through the same change of
    // variables
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> normal(0.0, 1.0);
    double sxx = 0, sxy = 0, syy = 0;
    const int m = 1'000'000;
    for (int i = 0; i < m; ++i) {
        const double u = d.sigma_diff * normal(rng);
        const double w = d.sigma_pump * normal(rng);
        const double vx = (lam * w - cfg.lambda_vis * u) / dl;
        const double tx = (lam * w - cfg.lambda_thz * u) / dl;
        sxx += vx * vx;
        syy += tx * tx;
        sxy += vx * tx;
    }
    const double corr_mc = sxy / std::sqrt(sxx * syy);

    const auto samples = biphoton::qmc_pair_samples(1 << 14, cfg);
    double qxx = 0, qxy = 0, qyy = 0;
    for (const auto& s : samples) {
        qxx += s.rho_vis.x * s.rho_vis.x;
        qyy += s.rho_thz.x * s.rho_thz.x;
        qxy += s.rho_vis.x * s.rho_thz.x;
    }
    const double corr_qmc = qxy / std::sqrt(qxx * qyy);

    CHECK(corr_qmc > 0.95);
    CHECK(corr_qmc == doctest::Approx(corr_mc).epsilon(0.01));
}

TEST_CASE("qmc samples are deterministic and partitionable by offset")
{
    optics::OpticalConfig cfg;
    const auto a = biphoton::qmc_pair_samples(512, cfg, 0);
    const auto b = biphoton::qmc_pair_samples(512, cfg, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].rho_vis.x == b[i].rho_vis.x);
        CHECK(a[i].rho_thz.y == b[i].rho_thz.y);
    }
    const auto whole = biphoton::qmc_pair_samples(1024, cfg, 0);
    const auto tail = biphoton::qmc_pair_samples(512, cfg, 512);
    for (std::size_t i = 0; i < 512; ++i) {
        CHECK(whole[512 + i].rho_vis.x == tail[i].rho_vis.x);
        CHECK(whole[512 + i].rho_thz.x == tail[i].rho_thz.x);
    }
}

TEST_CASE("qmc box integral converges to the quadrature value")
{
    optics::OpticalConfig cfg;
    const double half = 1.5e-4;

    // dense-grid oracle for the integral of P over the 4D box
    const int m = 41;
    const double h = 2.0 * half / (m - 1);
    double box = 0.0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int e = 0; e < m; ++e) {
                    double w = 1.0;
                    for (int idx : {a, b, c, e})
                        if (idx == 0 || idx == m - 1)
                            w *= 0.5;
                    box += w * biphoton::transition_probability(
                                   {-half + h * a, -half + h * b},
                                   {-half + h * c, -half + h * e}, cfg);
                }
    box *= h * h * h * h;

    const double norm = biphoton::analytic_normalization(cfg);
    auto qmc_estimate = [&](std::size_t n) {
        const auto samples = biphoton::qmc_pair_samples(n, cfg);
        std::size_t inside = 0;
        for (const auto& s : samples)
            if (std::abs(s.rho_vis.x) <= half &&
                std::abs(s.rho_vis.y) <= half &&
                std::abs(s.rho_thz.x) <= half &&
                std::abs(s.rho_thz.y) <= half)
                ++inside;
        return norm * static_cast<double>(inside) / static_cast<double>(n);
    };

    const double err10 = std::abs(qmc_estimate(1 << 10) - box);
    const double err16 = std::abs(qmc_estimate(1 << 16) - box);
    CHECK(err16 < err10);
    CHECK(err16 / box < 0.02);
}

TEST_CASE("normalization check against the analytic closed form")
{
    optics::OpticalConfig cfg;
    const double analytic = biphoton::analytic_normalization(cfg);
    CHECK(analytic == doctest::Approx(1.01333).epsilon(1e-4));

    const double quad = biphoton::normalization_check(cfg, 3e-3, 96);
    CHECK(quad == doctest::Approx(analytic).epsilon(0.005));
}

TEST_CASE("normalization check tracks the wavelength ratio")
{
    optics::OpticalConfig cfg;
    cfg.lambda_vis = 2e-6;  // 1% of the idler wavelength
    const double analytic = biphoton::analytic_normalization(cfg);
    CHECK(analytic == doctest::Approx(1.040812).epsilon(1e-5));
    const double quad = biphoton::normalization_check(cfg, 3e-3, 96);
    CHECK(quad == doctest::Approx(analytic).epsilon(1e-3));
}

TEST_CASE("normalization check error handling")
{
    optics::OpticalConfig cfg;
    CHECK_THROWS_AS(biphoton::normalization_check(cfg, 2e-3, 64),
                    std::invalid_argument);  // extent below 6 sigma
    CHECK_THROWS_AS(biphoton::normalization_check(cfg, 3e-3, 24),
                    biphoton::GridTooCoarse);
}

TEST_CASE("normalization is insensitive to extent beyond the tails")
{
    // fat-crystal configuration so a coarse grid resolves the ridge and the
    // extent comparison stays cheap
    optics::OpticalConfig cfg;
    cfg.crystal_length = 25e-3;
    const double a = biphoton::normalization_check(cfg, 5.2e-3, 33);
    const double b = biphoton::normalization_check(cfg, 10.4e-3, 65);
    CHECK(std::abs(a - b) / b < 1e-6);
}
