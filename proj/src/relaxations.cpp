#include "detssl/relaxations.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "detssl/errors.hpp"
#include "detssl/rule_relaxation.hpp"

namespace detssl::relax {

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Entropy: return "entropy";
        case Kind::MutualExclusivity: return "exclusivity";
        case Kind::PseudoLabel: return "pseudo_label";
        case Kind::DetPrior: return "dp";
        case Kind::CompiledRules: return "rules";
    }
    return "?";
}

void RelaxationSpec::validate() const {
    if (!(epsilon > 0.0) || epsilon > 1e-3)
        throw ConfigError("relaxation epsilon must lie in (0, 1e-3], got " +
                          std::to_string(epsilon));
    if (kind == Kind::DetPrior && !(temperature > 0.0))
        throw ConfigError("DP temperature must be > 0, got " + std::to_string(temperature));
    if (kind == Kind::CompiledRules && !rules)
        throw ConfigError("CompiledRules relaxation requires a compiled rule set");
}

namespace {

std::size_t argmax_lowest(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] > v[best]) best = k;
    return best;
}

double entropy_value(std::span<const double> theta) {
    double h = 0.0;
    for (double t : theta)
        if (t > 0.0) h += t * std::log(t);
    return h;
}

// S = sum_k theta_k prod_{k' != k} (1 - theta_k') on clamped components.
// Factors are bounded below by eps, so dividing the full product back out
// stays well-conditioned.
struct ExclusivityParts {
    double sum = 0.0;
    double prod = 1.0;  // prod_k (1 - theta_k)
    std::vector<double> terms;
    std::vector<double> one_minus;
};

ExclusivityParts exclusivity_parts(std::span<const double> theta, double eps) {
    ExclusivityParts p;
    p.terms.resize(theta.size());
    p.one_minus.resize(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        p.one_minus[k] = 1.0 - clamp_prob(theta[k], eps);
        p.prod *= p.one_minus[k];
    }
    for (std::size_t k = 0; k < theta.size(); ++k) {
        p.terms[k] = clamp_prob(theta[k], eps) * p.prod / p.one_minus[k];
        p.sum += p.terms[k];
    }
    return p;
}

LossGrad entropy_grad(std::span<const double> theta, double eps) {
    LossGrad out;
    out.value = entropy_value(theta);
    out.grad.resize(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k)
        out.grad[k] = std::log(clamp_prob(theta[k], eps)) + 1.0;
    return out;
}

LossGrad exclusivity_grad(std::span<const double> theta, double eps) {
    ExclusivityParts p = exclusivity_parts(theta, eps);
    LossGrad out;
    out.value = std::log(p.sum);
    out.grad.resize(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        double ds = (p.prod - (p.sum - p.terms[j])) / p.one_minus[j];
        out.grad[j] = ds / p.sum;
    }
    return out;
}

LossGrad pseudo_label_grad(std::span<const double> theta, double eps) {
    std::size_t star = argmax_lowest(theta);
    double t = clamp_prob(theta[star], eps);
    LossGrad out;
    out.value = std::log(t);
    out.grad.assign(theta.size(), 0.0);
    out.grad[star] = 1.0 / t;
    return out;
}

LossGrad dp_grad(std::span<const double> theta, double temperature, double eps) {
    std::vector<double> log_pow(theta.size());
    std::vector<double> log_t(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        log_t[k] = std::log(clamp_prob(theta[k], eps));
        log_pow[k] = temperature * log_t[k];
    }
    LossGrad out;
    out.value = logsumexp(log_pow);
    out.grad.resize(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k)
        out.grad[k] = temperature * std::exp((temperature - 1.0) * log_t[k] - out.value);
    return out;
}

}  // namespace

double entropy_loss(const ProbVector& theta) { return entropy_value(theta.values()); }

double exclusivity_loss(const ProbVector& theta, double eps) {
    return std::log(exclusivity_parts(theta.values(), eps).sum);
}

double pseudo_label_loss(const ProbVector& theta, double eps) {
    return std::log(clamp_prob(theta[argmax_lowest(theta.values())], eps));
}

double dp_loss(const ProbVector& theta, double temperature, double eps) {
    if (!(temperature > 0.0))
        throw ConfigError("DP temperature must be > 0, got " + std::to_string(temperature));
    std::vector<double> log_pow(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k)
        log_pow[k] = temperature * std::log(clamp_prob(theta[k], eps));
    return logsumexp(log_pow);
}

LossGrad unsup_loss_grad(const RelaxationSpec& spec, std::span<const double> theta) {
    spec.validate();
    // Gradients live on the open box: the Table-1 formulas extend off the
    // simplex, which finite-difference probes rely on.
    validate_attribute_param(theta);
    if (spec.kind != Kind::CompiledRules && theta.size() < 2)
        throw std::invalid_argument("simplex relaxations need K >= 2 components");
    return unsup_loss_grad_unchecked(spec, theta);
}

LossGrad unsup_loss_grad_unchecked(const RelaxationSpec& spec, std::span<const double> theta) {
    switch (spec.kind) {
        case Kind::Entropy: return entropy_grad(theta, spec.epsilon);
        case Kind::MutualExclusivity: return exclusivity_grad(theta, spec.epsilon);
        case Kind::PseudoLabel: return pseudo_label_grad(theta, spec.epsilon);
        case Kind::DetPrior: return dp_grad(theta, spec.temperature, spec.epsilon);
        case Kind::CompiledRules: return spec.rules->logloss_grad(theta, spec.epsilon);
    }
    throw std::logic_error("unreachable relaxation kind");
}

}  // namespace detssl::relax
