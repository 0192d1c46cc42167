#pragma once

#include <functional>

namespace detssl {

/// Adaptive Gauss-Kronrod (G7,K15) integration to an absolute tolerance.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol, int max_depth = 48);

/// As integrate(), but pre-splits the interval on a geometric ladder toward
/// both endpoints before adapting. Suited to densities sharply peaked at the
/// interval ends, like p(theta) at large class separations.
double integrate_endpoint_refined(const std::function<double(double)>& f, double lo,
                                  double hi, double abs_tol);

}  // namespace detssl
