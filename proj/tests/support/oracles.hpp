// Test-only oracles: independent reference implementations used to freeze
// expected values. Nothing here may call the implementation path it checks.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "detssl/gaussmix.hpp"
#include "detssl/rng.hpp"

namespace detssl::testing {

// Central finite differences of a scalar function.
inline std::vector<double> finite_diff(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
    double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double orig = x[i];
        x[i] = orig + h;
        double up = f(x);
        x[i] = orig - h;
        double down = f(x);
        x[i] = orig;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

inline double vector_rel_err(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    double denom = std::sqrt(na) + std::sqrt(nb);
    if (denom < 1e-12) return 0.0;
    return std::sqrt(diff) / denom;
}

// Interior simplex point with components bounded away from 0.
inline std::vector<double> random_interior_simplex(int k, CounterRng& rng) {
    std::vector<double> v(k);
    double sum = 0.0;
    for (double& x : v) {
        x = -std::log(rng.uniform01());
        sum += x;
    }
    for (double& x : v) x = 0.8 * (x / sum) + 0.2 / k;
    return v;
}

// Change-of-variables oracle for the theta density: p(x(theta)) |dx/dtheta|,
// composed from the forward map only; independent of the closed form.
inline double theta_density_oracle(double theta, const gaussmix::GaussianMixture1D& mix) {
    double x = gaussmix::x_of_theta(theta, mix);
    double slope = (mix.mu1 - mix.mu0) / (mix.sigma * mix.sigma);
    double dx_dtheta = 1.0 / (theta * (1.0 - theta) * std::abs(slope));
    return gaussmix::p_x_density(x, mix) * dx_dtheta;
}

}  // namespace detssl::testing
