#pragma once

#include <Eigen/Core>

#include "jase/dataset.hpp"
#include "jase/glm.hpp"
#include "jase/vctest.hpp"

namespace jase {

/// Projection of the joint score vector onto the tested directions,
/// accounting for estimation of the null coefficients. With
/// U_i = (X_i', V_i') and W = diag(mu(1-mu)):
///   D = n^{-1} U' W U,   A = [-D_XV' D_XX^{-1}, I_m].
struct ProjectedKernel {
  Eigen::MatrixXd d_mat;  // (qn+m) x (qn+m)
  Eigen::MatrixXd a_mat;  // m x (qn+m)
  Eigen::MatrixXd u_mat;  // n x (qn+m), columns [null design | V]
  Eigen::Index qn = 0;    // null-design columns
  Eigen::Index m = 0;     // tested (V) columns
};

/// V assembled from an arbitrary null design and tested block.
ProjectedKernel projected_kernel(const Eigen::MatrixXd& null_design,
                                 const Eigen::MatrixXd& v,
                                 const Eigen::VectorXd& mu0);

/// V per variant: sqrt(a1) S; plus sqrt(a2) G; plus sqrt(a3) C.
ProjectedKernel projected_kernel(const Dataset& d, const Eigen::MatrixXd& c,
                                 const NullFit& nf, const Weights& w,
                                 StatVariant v);

/// Eigenvalues of A D A' (descending, small ones dropped); the limiting
/// null law of n Q is sum_l lambda_l chi^2_1.
struct Spectrum {
  Eigen::VectorXd lambdas;

  [[nodiscard]] double mean() const { return lambdas.sum(); }
  [[nodiscard]] double variance() const {
    return 2.0 * lambdas.squaredNorm();
  }
};

Spectrum spectrum(const ProjectedKernel& pk, double rel_tol = 1e-8);

/// Scaled chi-squared by matching the first two moments:
/// kappa = Var/(2E), nu = 2E^2/Var.
double pvalue_satterthwaite(const Spectrum& spec, double q_obs);

/// Characteristic-function inversion; clamped to [accuracy, 1]. Throws
/// jase::Error(NotConverged) when the integration fails so callers can
/// fall back to Satterthwaite.
double pvalue_davies(const Spectrum& spec, double q_obs,
                     double accuracy = 1e-6);

/// One null draw per noise row: eps_b = n^{-1/2} U'(r . noise_b) and
/// Q(0)_b = |A eps_b|^2. Bit-identical for identical noise.
Eigen::VectorXd perturbation_null_draws(const ProjectedKernel& pk,
                                        const Eigen::VectorXd& residuals,
                                        const Eigen::MatrixXd& noise);

/// Add-one tail frequency (1 + #{draws >= q_obs}) / (B + 1).
double pvalue_perturbation(const Eigen::VectorXd& draws, double q_obs);

}  // namespace jase
