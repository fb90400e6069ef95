#pragma once

#include <span>

namespace jase {

/// Outcome of the characteristic-function inversion for
/// P(sum_l lambda_l chi^2_1 > q).
struct DaviesResult {
  double p = 0.0;       // survival probability
  int fault = 0;        // 0 ok; 1 accuracy not attainable within max_terms;
                        // 2 round-off may be significant; 4 term cap hit
  double abserr = 0.0;  // accumulated integration error estimate
};

/// Numerical inversion of prod_l (1 - 2 i t lambda_l)^{-1/2} after
/// Davies's adaptive scheme: locate the distribution's effective range via
/// Chernoff-type tail bounds, pick the trapezoid spacing from it, and add
/// Gaussian convergence factors when the main integration would need too
/// many terms. Absolute error <= acc on success.
DaviesResult davies_qf(std::span<const double> lambdas, double q,
                       double acc = 1e-6, int max_terms = 10000);

}  // namespace jase
