#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
// Deterministic: the interval with the largest error estimate is bisected
// until the summed estimate drops below the tolerance.

#include <functional>

namespace thick {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
  bool converged = true;
};

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    double abs_tol, int max_subdivisions);

}  // namespace thick
