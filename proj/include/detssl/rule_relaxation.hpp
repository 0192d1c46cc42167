#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "detssl/logic.hpp"
#include "detssl/numeric.hpp"

namespace detssl::logic {

/// Scalar relaxation of a delta spike: g(0) = 0, g(1) = 1, monotone on [0,1].
/// Identity recovers semantic loss; Power is the temperature spike.
struct GFunction {
    enum class Kind { Identity, Power };

    Kind kind = Kind::Identity;
    double temperature = 1.0;  // Power only, > 0

    double operator()(double x) const;
    double log_value(double x) const;   // log g(x)
    double dlog_value(double x) const;  // d/dx log g(x)
    void validate() const;              // throws ConfigError
};

/// Differentiable relaxation q_R(theta) of a rule set's support:
/// a sum over clauses of products of g(theta_k) / g(1 - theta_k).
///
/// Built from a valid set (minterm form, disjoint clauses, exact indicator on
/// binary vectors) or directly from a compact DNF, where overlapping clauses
/// can double-count mass at vertices.
class CompiledRelaxation {
public:
    static CompiledRelaxation from_valid_set(
        const ValidSet& valid, GFunction g,
        const std::map<std::uint32_t, double>* weights = nullptr);
    static CompiledRelaxation from_dnf(const DnfForm& dnf, GFunction g);

    /// q_R(theta); no clamping, defined on all of [0,1]^K.
    double evaluate(std::span<const double> theta) const;

    /// (log q_R, d log q_R / d theta), computed in log space with theta
    /// clamped to [eps, 1-eps]; out-of-box components are handled by the
    /// clamp, non-finite ones propagate. Throws UnsatisfiableRulesError when
    /// the clause list is empty.
    LossGrad logloss_grad(std::span<const double> theta, double eps) const;

    int num_attributes() const { return k_; }
    std::size_t clause_count() const { return clauses_.size(); }
    bool minterm_form() const { return minterm_; }
    bool weighted() const { return weighted_; }
    const GFunction& g() const { return g_; }

private:
    CompiledRelaxation() = default;

    int k_ = 0;
    bool minterm_ = false;
    bool weighted_ = false;
    std::vector<DnfClause> clauses_;
    std::vector<double> log_weights_;  // per clause; 0 when unweighted
    GFunction g_;
};

}  // namespace detssl::logic
