#include "thzqi/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace thzqi::fit {

namespace {

// Solve A x = b in place, A is n x n row-major. Returns false if singular.
bool solve_dense(std::vector<double> a, std::vector<double> b, int n,
                 std::vector<double>& x)
{
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col]))
                pivot = r;
        if (std::abs(a[pivot * n + col]) < 1e-300)
            return false;
        if (pivot != col) {
            for (int c = 0; c < n; ++c)
                std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] * inv;
            if (f == 0.0)
                continue;
            for (int c = col; c < n; ++c)
                a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c)
            s -= a[r * n + c] * x[c];
        x[r] = s / a[r * n + r];
    }
    return true;
}

double chi_squared(const ModelFn& model, const std::vector<double>& xs,
                   const std::vector<double>& ys, const std::vector<double>& p)
{
    double chi2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - model(xs[i], p, nullptr);
        chi2 += r * r;
    }
    return chi2;
}

}  // namespace

LevMarResult levmar(const ModelFn& model, const std::vector<double>& xs,
                    const std::vector<double>& ys, std::vector<double> p0,
                    const LevMarOptions& opts)
{
    if (xs.size() != ys.size())
        throw std::invalid_argument("levmar: xs and ys differ in length");
    const int np = static_cast<int>(p0.size());
    const int nd = static_cast<int>(xs.size());
    if (nd < np)
        throw std::invalid_argument("levmar: fewer points than parameters");

    LevMarResult res;
    res.params = p0;
    res.chi2 = chi_squared(model, xs, ys, p0);

    double damping = opts.initial_damping;
    std::vector<double> jac(np);
    std::vector<double> jtj(np * np);
    std::vector<double> jtr(np);
    std::vector<double> step;

    for (int it = 0; it < opts.max_iterations; ++it) {
        res.iterations = it + 1;
        std::fill(jtj.begin(), jtj.end(), 0.0);
        std::fill(jtr.begin(), jtr.end(), 0.0);
        for (int i = 0; i < nd; ++i) {
            const double r = ys[i] - model(xs[i], res.params, jac.data());
            for (int a = 0; a < np; ++a) {
                jtr[a] += jac[a] * r;
                for (int b = a; b < np; ++b)
                    jtj[a * np + b] += jac[a] * jac[b];
            }
        }
        for (int a = 0; a < np; ++a)
            for (int b = 0; b < a; ++b)
                jtj[a * np + b] = jtj[b * np + a];

        bool stepped = false;
        for (int attempt = 0; attempt < 40 && !stepped; ++attempt) {
            std::vector<double> damped = jtj;
            for (int a = 0; a < np; ++a) {
                double d = jtj[a * np + a] * damping;
                if (d <= 0.0)
                    d = damping;
                damped[a * np + a] += d;
            }
            if (!solve_dense(damped, jtr, np, step)) {
                damping *= 10.0;
                continue;
            }
            std::vector<double> trial = res.params;
            for (int a = 0; a < np; ++a)
                trial[a] += step[a];
            const double trial_chi2 = chi_squared(model, xs, ys, trial);
            if (trial_chi2 <= res.chi2) {
                double rel = 0.0;
                for (int a = 0; a < np; ++a)
                    rel = std::max(rel, std::abs(step[a]) /
                                            (1.0 + std::abs(res.params[a])));
                res.params = trial;
                const double improvement = res.chi2 - trial_chi2;
                res.chi2 = trial_chi2;
                damping = std::max(damping * 0.3, 1e-14);
                stepped = true;
                if (rel < opts.step_tolerance ||
                    improvement <= 1e-30 + 1e-14 * res.chi2) {
                    res.converged = true;
                }
            } else {
                damping *= 10.0;
            }
        }
        if (!stepped) {
            // damping exhausted: local minimum within numerical resolution
            res.converged = true;
        }
        if (res.converged)
            break;
    }

    // covariance = inv(JtJ) * chi2 / dof at the solution
    std::fill(jtj.begin(), jtj.end(), 0.0);
    for (int i = 0; i < nd; ++i) {
        model(xs[i], res.params, jac.data());
        for (int a = 0; a < np; ++a)
            for (int b = a; b < np; ++b)
                jtj[a * np + b] += jac[a] * jac[b];
    }
    for (int a = 0; a < np; ++a)
        for (int b = 0; b < a; ++b)
            jtj[a * np + b] = jtj[b * np + a];
    res.covariance.assign(np * np, 0.0);
    const double dof = std::max(1, nd - np);
    std::vector<double> col;
    std::vector<double> e(np, 0.0);
    for (int c = 0; c < np; ++c) {
        std::fill(e.begin(), e.end(), 0.0);
        e[c] = 1.0;
        if (solve_dense(jtj, e, np, col))
            for (int r = 0; r < np; ++r)
                res.covariance[r * np + c] = col[r] * res.chi2 / dof;
    }
    return res;
}

}  // namespace thzqi::fit
