#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace detssl {

/// Checks K >= 2, components in [0,1], sum within 1e-9 of 1.
/// Throws std::invalid_argument otherwise.
void validate_prob_vector(std::span<const double> values);

/// Checks K >= 1 and components in [0,1].
void validate_attribute_param(std::span<const double> values);

/// A point on the K-simplex: the multinomial parameter of p(y|x).
class ProbVector {
public:
    explicit ProbVector(std::vector<double> values);

    const std::vector<double>& values() const { return v_; }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }

private:
    std::vector<double> v_;
};

/// Per-attribute Bernoulli parameters: a point in [0,1]^K, no sum constraint.
class AttributeParam {
public:
    explicit AttributeParam(std::vector<double> values);

    const std::vector<double>& values() const { return v_; }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }

private:
    std::vector<double> v_;
};

}  // namespace detssl
