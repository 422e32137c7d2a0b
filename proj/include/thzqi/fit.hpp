#pragma once

#include <functional>
#include <vector>

namespace thzqi::fit {

struct LevMarOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-14;
    double initial_damping = 1e-3;
};

struct LevMarResult {
    std::vector<double> params;
    std::vector<double> covariance;  // row-major p x p, scaled by chi2/(n-p)
    double chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Model callback: given abscissa x and parameters p, return the model value
/// and (if jac != nullptr) fill jac[0..p-1] with the partial derivatives.
using ModelFn =
    std::function<double(double x, const std::vector<double>& p, double* jac)>;

/// Damped least squares (Levenberg-Marquardt with multiplicative diagonal
/// damping). Intended for small parameter counts; solves the normal
/// equations by Gaussian elimination.
LevMarResult levmar(const ModelFn& model, const std::vector<double>& xs,
                    const std::vector<double>& ys, std::vector<double> p0,
                    const LevMarOptions& opts = {});

}  // namespace thzqi::fit
