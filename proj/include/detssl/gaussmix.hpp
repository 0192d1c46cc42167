#pragma once

#include <cstdint>
#include <vector>

namespace detssl::gaussmix {

/// Mixture of two 1-D Gaussians with a shared standard deviation.
struct GaussianMixture1D {
    double mu0 = -1.0;
    double mu1 = 1.0;
    double sigma = 1.0;
    double pi1 = 0.5;  // class-1 prior; pi0 = 1 - pi1

    double pi0() const { return 1.0 - pi1; }
    void validate() const;  // throws ConfigError
};

/// Coefficients of the closed-form density of theta = p(y=1|x):
///   p(theta) = prefactor / (theta_0 theta_1) *
///              sum_k pi_k exp(a u^2 + b_k u + c_k),   u = log(theta_1/theta_0).
///
/// Derived from p(theta) = |dx/dtheta| p(x(theta)) with
/// x(theta) = (u - offset) / slope, slope = (mu1-mu0)/sigma^2,
/// offset = log(pi1/pi0) - (mu1^2-mu0^2)/(2 sigma^2).
struct ThetaDensityCoeffs {
    double a = 0.0;          // always < 0
    double b[2] = {0, 0};    // per class k
    double c[2] = {0, 0};
    double prefactor = 0.0;  // sigma / (|mu1-mu0| sqrt(2 pi))
};

ThetaDensityCoeffs theta_density_coeffs(const GaussianMixture1D& mix);

/// theta(x) = p(y=1|x), the logistic of an affine function of x.
double theta_of_x(double x, const GaussianMixture1D& mix);

/// Exact inverse of theta_of_x. Throws std::domain_error for theta
/// outside (0,1).
double x_of_theta(double theta, const GaussianMixture1D& mix);

/// d theta / dx = theta (1-theta) (mu1-mu0)/sigma^2 at x.
double dtheta_dx(double x, const GaussianMixture1D& mix);

/// Marginal density p(x) = sum_k pi_k Normal(x; mu_k, sigma^2).
double p_x_density(double x, const GaussianMixture1D& mix);

/// Joint p(x, y=k) = pi_k Normal(x; mu_k, sigma^2).
double p_x_joint(double x, int k, const GaussianMixture1D& mix);

/// Closed-form density of theta; throws std::domain_error at theta in {0,1}.
double p_theta_density(double theta, const GaussianMixture1D& mix);

/// Closed-form joint p(theta, y=k); the components sum to p_theta_density.
double p_theta_joint(double theta, int k, const GaussianMixture1D& mix);

struct Sample {
    double x;
    int y;
};

/// y ~ Bernoulli(pi1), x ~ Normal(mu_y, sigma^2), via inverse CDFs on a
/// counter-based generator; deterministic per seed across platforms.
std::vector<Sample> sample(const GaussianMixture1D& mix, std::size_t n, std::uint64_t seed);

/// Quadrature of p(theta) over [lo, hi] with boundary refinement.
double theta_density_mass(const GaussianMixture1D& mix, double lo, double hi,
                          double abs_tol = 1e-6);

}  // namespace detssl::gaussmix
