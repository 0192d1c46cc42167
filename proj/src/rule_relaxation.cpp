#include "detssl/rule_relaxation.hpp"

#include <cmath>
#include <string>

#include "detssl/errors.hpp"
#include "detssl/prob.hpp"

namespace detssl::logic {

double GFunction::operator()(double x) const {
    return kind == Kind::Identity ? x : std::pow(x, temperature);
}

double GFunction::log_value(double x) const {
    return kind == Kind::Identity ? std::log(x) : temperature * std::log(x);
}

double GFunction::dlog_value(double x) const {
    return kind == Kind::Identity ? 1.0 / x : temperature / x;
}

void GFunction::validate() const {
    if (kind == Kind::Power && !(temperature > 0.0))
        throw ConfigError("g Power temperature must be > 0, got " +
                          std::to_string(temperature));
}

CompiledRelaxation CompiledRelaxation::from_valid_set(
    const ValidSet& valid, GFunction g, const std::map<std::uint32_t, double>* weights) {
    g.validate();
    if (weights) {
        for (const auto& [vec, w] : *weights) {
            if (!valid.contains(vec))
                throw ConfigError("weight given for vector " +
                                  format_vector(vec, valid.num_attributes) +
                                  " outside the valid set");
            if (!(w > 0.0)) throw ConfigError("relaxation weights must be positive");
        }
    }

    CompiledRelaxation out;
    out.k_ = valid.num_attributes;
    out.minterm_ = true;
    out.weighted_ = weights != nullptr && !weights->empty();
    out.g_ = g;
    DnfForm minterms = minterms_of(valid);
    out.clauses_ = std::move(minterms.clauses);
    out.log_weights_.assign(out.clauses_.size(), 0.0);
    if (out.weighted_) {
        for (std::size_t i = 0; i < out.clauses_.size(); ++i) {
            auto it = weights->find(out.clauses_[i].pos);
            if (it != weights->end()) out.log_weights_[i] = std::log(it->second);
        }
    }
    return out;
}

CompiledRelaxation CompiledRelaxation::from_dnf(const DnfForm& dnf, GFunction g) {
    g.validate();
    CompiledRelaxation out;
    out.k_ = dnf.num_attributes;
    out.minterm_ = false;
    out.g_ = g;
    out.clauses_ = dnf.clauses;
    out.log_weights_.assign(out.clauses_.size(), 0.0);
    return out;
}

double CompiledRelaxation::evaluate(std::span<const double> theta) const {
    validate_attribute_param(theta);
    if (theta.size() != static_cast<std::size_t>(k_))
        throw std::invalid_argument("theta has " + std::to_string(theta.size()) +
                                    " components, rules expect " + std::to_string(k_));
    double total = 0.0;
    for (std::size_t c = 0; c < clauses_.size(); ++c) {
        double term = std::exp(log_weights_[c]);
        for (int k = 0; k < k_; ++k) {
            std::uint32_t bit = 1u << k;
            if (clauses_[c].pos & bit)
                term *= g_(theta[k]);
            else if (clauses_[c].neg & bit)
                term *= g_(1.0 - theta[k]);
        }
        total += term;
    }
    return total;
}

LossGrad CompiledRelaxation::logloss_grad(std::span<const double> theta, double eps) const {
    if (theta.size() != static_cast<std::size_t>(k_))
        throw std::invalid_argument("theta has " + std::to_string(theta.size()) +
                                    " components, rules expect " + std::to_string(k_));
    if (clauses_.empty())
        throw UnsatisfiableRulesError("rules are unsatisfiable: the relaxation has no support");

    std::vector<double> t = clamp_probs(theta, eps);

    std::vector<double> clause_log(clauses_.size());
    for (std::size_t c = 0; c < clauses_.size(); ++c) {
        double l = log_weights_[c];
        for (int k = 0; k < k_; ++k) {
            std::uint32_t bit = 1u << k;
            if (clauses_[c].pos & bit)
                l += g_.log_value(t[k]);
            else if (clauses_[c].neg & bit)
                l += g_.log_value(1.0 - t[k]);
        }
        clause_log[c] = l;
    }

    LossGrad out;
    out.value = logsumexp(clause_log);
    out.grad.assign(k_, 0.0);
    for (std::size_t c = 0; c < clauses_.size(); ++c) {
        double responsibility = std::exp(clause_log[c] - out.value);
        for (int k = 0; k < k_; ++k) {
            std::uint32_t bit = 1u << k;
            if (clauses_[c].pos & bit)
                out.grad[k] += responsibility * g_.dlog_value(t[k]);
            else if (clauses_[c].neg & bit)
                out.grad[k] -= responsibility * g_.dlog_value(1.0 - t[k]);
        }
    }
    return out;
}

}  // namespace detssl::logic
