#pragma once

#include <memory>
#include <span>

#include "detssl/numeric.hpp"
#include "detssl/prob.hpp"

namespace detssl::logic {
class CompiledRelaxation;
}

namespace detssl::relax {

/// Probability clamp applied before any log or power.
inline constexpr double kDefaultEps = 1e-7;

enum class Kind { Entropy, MutualExclusivity, PseudoLabel, DetPrior, CompiledRules };

const char* kind_name(Kind k);

/// Which continuous relaxation q(theta) of the discrete prior is in force,
/// plus its hyperparameters. All losses are in log-likelihood ("maximize")
/// orientation: the maximum value 0 is attained on the support of the prior,
/// and the trainer negates.
struct RelaxationSpec {
    Kind kind = Kind::Entropy;
    double temperature = 10.0;  // DetPrior spike / CompiledRules Power g
    double epsilon = kDefaultEps;
    std::shared_ptr<const logic::CompiledRelaxation> rules;  // CompiledRules only

    void validate() const;  // throws ConfigError
};

/// Sum of theta_k log theta_k with 0 log 0 = 0. Zero exactly at one-hot.
double entropy_loss(const ProbVector& theta);

/// log of sum_k theta_k prod_{k' != k} (1 - theta_k').
double exclusivity_loss(const ProbVector& theta, double eps = kDefaultEps);

/// log max_k theta_k; argmax ties break toward the lowest index.
double pseudo_label_loss(const ProbVector& theta, double eps = kDefaultEps);

/// log sum_k theta_k^T, the spike relaxation, evaluated as a logsumexp.
/// Throws ConfigError for temperature <= 0.
double dp_loss(const ProbVector& theta, double temperature, double eps = kDefaultEps);

/// Loss value and raw componentwise gradient for the spec'd relaxation.
/// Validates theta as a box point; no simplex-tangent projection is applied,
/// the network head absorbs the constraint.
LossGrad unsup_loss_grad(const RelaxationSpec& spec, std::span<const double> theta);

/// Trainer hot path: trusts theta to be a head output and skips validation,
/// so non-finite predictions propagate into a non-finite loss for the
/// divergence guard instead of a validation error.
LossGrad unsup_loss_grad_unchecked(const RelaxationSpec& spec, std::span<const double> theta);

}  // namespace detssl::relax
