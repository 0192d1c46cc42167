#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace detssl {

/// Loss value together with its raw per-component partial derivatives.
struct LossGrad {
    double value = 0.0;
    std::vector<double> grad;
};

inline double clamp_prob(double x, double eps) {
    return std::clamp(x, eps, 1.0 - eps);
}

inline std::vector<double> clamp_probs(std::span<const double> v, double eps) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = clamp_prob(v[i], eps);
    return out;
}

inline double logsumexp(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace detssl
