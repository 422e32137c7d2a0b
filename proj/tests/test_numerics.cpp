#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "thzqi/fft.hpp"
#include "thzqi/fit.hpp"
#include "thzqi/qmc.hpp"

using namespace thzqi;

TEST_CASE("radical inverse digit reversal")
{
    CHECK(qmc::radical_inverse(1, 2) == doctest::Approx(0.5));
    CHECK(qmc::radical_inverse(2, 2) == doctest::Approx(0.25));
    CHECK(qmc::radical_inverse(3, 2) == doctest::Approx(0.75));
    CHECK(qmc::radical_inverse(1, 3) == doctest::Approx(1.0 / 3.0));
    CHECK(qmc::radical_inverse(0, 5) == 0.0);
}

TEST_CASE("inverse normal cdf round trip")
{
    auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    CHECK(qmc::inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    for (double p : {1e-12, 1e-8, 1e-4, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0 - 1e-6,
                     1.0 - 1e-10}) {
        const double z = qmc::inverse_normal_cdf(p);
        CHECK(cdf(z) == doctest::Approx(p).epsilon(1e-11));
    }
    // symmetry
    CHECK(qmc::inverse_normal_cdf(0.025) ==
          doctest::Approx(-qmc::inverse_normal_cdf(0.975)).epsilon(1e-13));
    CHECK_THROWS_AS(qmc::inverse_normal_cdf(0.0), std::domain_error);
    CHECK_THROWS_AS(qmc::inverse_normal_cdf(1.0), std::domain_error);
}

TEST_CASE("counter hash is order dependent and reproducible")
{
    const auto a = qmc::hash_combine(qmc::hash_combine(1, 2), 3);
    CHECK(a == qmc::hash_combine(qmc::hash_combine(1, 2), 3));
    CHECK(a != qmc::hash_combine(qmc::hash_combine(1, 3), 2));
    const double u = qmc::hash_to_unit(a);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
}

TEST_CASE("fft matches a naive dft")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const std::size_t n = 64;
    std::vector<std::complex<double>> x(n);
    for (auto& v : x)
        v = {uni(rng), uni(rng)};

    auto fftd = x;
    fft::transform(fftd);

    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = -2.0 * M_PI * static_cast<double>(k * j) /
                               static_cast<double>(n);
            acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        CHECK(std::abs(fftd[k] - acc) < 1e-10);
    }
}

TEST_CASE("fft inverse round trip")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<std::complex<double>> x(128);
    for (auto& v : x)
        v = {uni(rng), uni(rng)};
    auto y = x;
    fft::transform(y);
    fft::transform(y, /*inverse=*/true);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(y[i] - x[i]) < 1e-12);
}

TEST_CASE("next_pow2")
{
    CHECK(fft::next_pow2(1) == 1);
    CHECK(fft::next_pow2(2) == 2);
    CHECK(fft::next_pow2(600) == 1024);
    CHECK(fft::next_pow2(1024) == 1024);
}

TEST_CASE("levmar recovers an error function exactly")
{
    const double a = 2.0, b = 1.5, x0 = 0.3e-3, sigma = 80e-6;
    std::vector<double> xs, ys;
    for (int i = 0; i < 16; ++i) {
        const double x = -0.4e-3 + 0.05e-3 * i + x0;
        xs.push_back(x);
        ys.push_back(a + b * std::erf((x - x0) / (std::sqrt(2.0) * sigma)));
    }
    auto model = [](double x, const std::vector<double>& p,
                    double* jac) -> double {
        const double u = (x - p[2]) / (std::sqrt(2.0) * p[3]);
        const double e = std::erf(u);
        if (jac) {
            const double g = 2.0 / std::sqrt(M_PI) * std::exp(-u * u);
            jac[0] = 1.0;
            jac[1] = e;
            jac[2] = -p[1] * g / (std::sqrt(2.0) * p[3]);
            jac[3] = -p[1] * g * u / p[3];
        }
        return p[0] + p[1] * e;
    };
    const auto res = fit::levmar(model, xs, ys, {1.0, 1.0, 0.0, 0.2e-3});
    REQUIRE(res.converged);
    CHECK(res.params[0] == doctest::Approx(a).epsilon(1e-8));
    CHECK(res.params[1] == doctest::Approx(b).epsilon(1e-8));
    CHECK(res.params[2] == doctest::Approx(x0).epsilon(1e-8));
    CHECK(res.params[3] == doctest::Approx(sigma).epsilon(1e-8));
}

TEST_CASE("levmar covariance scale on noisy data")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<double> xs, ys;
    for (int i = 0; i < 64; ++i) {
        const double x = 0.1 * i;
        xs.push_back(x);
        ys.push_back(3.0 + 2.0 * x + noise(rng));
    }
    auto model = [](double x, const std::vector<double>& p,
                    double* jac) -> double {
        if (jac) {
            jac[0] = 1.0;
            jac[1] = x;
        }
        return p[0] + p[1] * x;
    };
    const auto res = fit::levmar(model, xs, ys, {0.0, 0.0});
    REQUIRE(res.converged);
    CHECK(res.params[1] == doctest::Approx(2.0).epsilon(0.02));
    CHECK(res.covariance[3] > 0.0);
    CHECK(std::sqrt(res.covariance[3]) < 0.05);
}
