#include "detssl/prob.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace detssl {

void validate_prob_vector(std::span<const double> values) {
    if (values.size() < 2)
        throw std::invalid_argument("probability vector needs K >= 2 components");
    double sum = 0.0;
    for (double x : values) {
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("probability component " + std::to_string(x) +
                                        " outside [0,1]");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("probability vector sums to " + std::to_string(sum) +
                                    ", not 1");
}

void validate_attribute_param(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("attribute parameter vector is empty");
    for (double x : values) {
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("attribute parameter " + std::to_string(x) +
                                        " outside [0,1]");
    }
}

ProbVector::ProbVector(std::vector<double> values) : v_(std::move(values)) {
    validate_prob_vector(v_);
}

AttributeParam::AttributeParam(std::vector<double> values) : v_(std::move(values)) {
    validate_attribute_param(v_);
}

}  // namespace detssl
