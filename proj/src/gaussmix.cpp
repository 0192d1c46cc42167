#include "detssl/gaussmix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "detssl/errors.hpp"
#include "detssl/quadrature.hpp"
#include "detssl/rng.hpp"

namespace detssl::gaussmix {

namespace {

constexpr double kSqrt2Pi = 2.506628274631000502;

double logistic(double z) {
    // Split on sign to avoid overflow in exp.
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double normal_pdf(double x, double mu, double sigma) {
    double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * kSqrt2Pi);
}

// theta(x) = logistic(slope * x + offset).
struct AffineLogit {
    double slope;
    double offset;
};

AffineLogit affine_logit(const GaussianMixture1D& m) {
    double s2 = m.sigma * m.sigma;
    return {(m.mu1 - m.mu0) / s2,
            std::log(m.pi1 / m.pi0()) - 0.5 * (m.mu1 * m.mu1 - m.mu0 * m.mu0) / s2};
}

void require_interior(double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("theta = " + std::to_string(theta) +
                                " is outside the open interval (0,1)");
}

}  // namespace

void GaussianMixture1D::validate() const {
    if (!(sigma > 0.0)) throw ConfigError("mixture sigma must be > 0");
    if (mu0 == mu1) throw ConfigError("mixture class means must differ");
    if (!(pi1 > 0.0 && pi1 < 1.0))
        throw ConfigError("mixture pi1 must lie in (0,1), got " + std::to_string(pi1));
}

ThetaDensityCoeffs theta_density_coeffs(const GaussianMixture1D& mix) {
    mix.validate();
    double s2 = mix.sigma * mix.sigma;
    double diff = mix.mu1 - mix.mu0;
    AffineLogit al = affine_logit(mix);

    // With u = logit(theta): x = (u - offset)/slope, and the Gaussian
    // exponent -(x - mu_k)^2 / (2 s2) expands to a u^2 + b_k u + c_k.
    ThetaDensityCoeffs co;
    co.a = -s2 / (2.0 * diff * diff);
    const double mus[2] = {mix.mu0, mix.mu1};
    for (int k = 0; k < 2; ++k) {
        double shift = al.offset + al.slope * mus[k];  // exponent center in u
        co.b[k] = -2.0 * co.a * shift;
        co.c[k] = co.a * shift * shift;
    }
    co.prefactor = mix.sigma / (std::abs(diff) * kSqrt2Pi);
    return co;
}

double theta_of_x(double x, const GaussianMixture1D& mix) {
    mix.validate();
    AffineLogit al = affine_logit(mix);
    return logistic(al.slope * x + al.offset);
}

double x_of_theta(double theta, const GaussianMixture1D& mix) {
    mix.validate();
    require_interior(theta);
    AffineLogit al = affine_logit(mix);
    double u = std::log(theta / (1.0 - theta));
    return (u - al.offset) / al.slope;
}

double dtheta_dx(double x, const GaussianMixture1D& mix) {
    double t = theta_of_x(x, mix);
    return t * (1.0 - t) * (mix.mu1 - mix.mu0) / (mix.sigma * mix.sigma);
}

double p_x_density(double x, const GaussianMixture1D& mix) {
    mix.validate();
    return mix.pi0() * normal_pdf(x, mix.mu0, mix.sigma) +
           mix.pi1 * normal_pdf(x, mix.mu1, mix.sigma);
}

double p_x_joint(double x, int k, const GaussianMixture1D& mix) {
    mix.validate();
    if (k != 0 && k != 1) throw std::invalid_argument("class index must be 0 or 1");
    double pi_k = k == 0 ? mix.pi0() : mix.pi1;
    double mu_k = k == 0 ? mix.mu0 : mix.mu1;
    return pi_k * normal_pdf(x, mu_k, mix.sigma);
}

double p_theta_joint(double theta, int k, const GaussianMixture1D& mix) {
    if (k != 0 && k != 1) throw std::invalid_argument("class index must be 0 or 1");
    require_interior(theta);
    ThetaDensityCoeffs co = theta_density_coeffs(mix);
    double u = std::log(theta / (1.0 - theta));
    double pi_k = k == 0 ? mix.pi0() : mix.pi1;
    return co.prefactor / (theta * (1.0 - theta)) * pi_k *
           std::exp(co.a * u * u + co.b[k] * u + co.c[k]);
}

double p_theta_density(double theta, const GaussianMixture1D& mix) {
    return p_theta_joint(theta, 0, mix) + p_theta_joint(theta, 1, mix);
}

std::vector<Sample> sample(const GaussianMixture1D& mix, std::size_t n, std::uint64_t seed) {
    mix.validate();
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");
    CounterRng rng(seed);
    std::vector<Sample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        int y = rng.uniform01() < mix.pi1 ? 1 : 0;
        double mu = y == 1 ? mix.mu1 : mix.mu0;
        out.push_back({mu + mix.sigma * rng.normal(), y});
    }
    return out;
}

double theta_density_mass(const GaussianMixture1D& mix, double lo, double hi,
                          double abs_tol) {
    mix.validate();
    // The density's limit at both endpoints is 0; quadrature nodes that round
    // onto a boundary take the limit value.
    auto f = [&mix](double t) {
        return (t > 0.0 && t < 1.0) ? p_theta_density(t, mix) : 0.0;
    };
    return integrate_endpoint_refined(f, lo, hi, abs_tol);
}

}  // namespace detssl::gaussmix
