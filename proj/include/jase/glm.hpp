#pragma once

#include <Eigen/Core>

#include "jase/dataset.hpp"

namespace jase {

struct LogisticOptions {
  double tol = 1e-8;       // on the max absolute score component
  int max_iter = 25;
  double ridge = 0.0;      // penalty excludes the intercept (column 0)
};

/// Fitted null logistic model logit(mu) = design * alpha0.
struct NullFit {
  Eigen::VectorXd alpha0;
  Eigen::VectorXd mu0;      // fitted probabilities, strictly inside (0,1)
  Eigen::MatrixXd design;   // the matrix that was fit (kept for projection)
  bool converged = false;
  bool separated = false;
  int iterations = 0;
  double loglik = 0.0;
};

/// Bernoulli log-likelihood at coefficients beta.
double logistic_loglik(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta);

/// IRLS fit of a logistic regression. Throws on rank deficiency (unless a
/// ridge penalty is supplied); flags separation via NullFit::separated.
NullFit fit_logistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                     const LogisticOptions& options = {});

/// Null model fit on [x | extra_columns]; extra_columns carries G for the
/// direct-effect null or S for the indirect-effect null.
NullFit fit_null_logistic(const Dataset& d,
                          const Eigen::MatrixXd& extra_columns = {},
                          const LogisticOptions& options = {});

/// Every coefficient of the joint outcome / expression models.
struct MediationCoefficients {
  Eigen::VectorXd alpha;   // covariate effects on outcome, length q
  Eigen::VectorXd beta_s;  // SNP main effects on outcome, length p
  double beta_g = 0.0;     // expression effect on outcome
  Eigen::VectorXd gamma;   // SNP-by-expression interactions, length p
  Eigen::VectorXd phi;     // covariate effects on expression, length q
  Eigen::VectorXd delta;   // SNP effects on expression, length p
  double sigma2_g = 0.0;   // residual expression variance, n - q - p denominator
};

/// Logistic MLE for (alpha, beta_s, beta_g, gamma) on [X S G C] and OLS
/// for (phi, delta) on [X S]. ridge > 0 stabilizes collinear designs.
MediationCoefficients fit_full_models(const Dataset& d, double ridge = 0.0);

}  // namespace jase
