#pragma once

#include <Eigen/Core>

#include "jase/glm.hpp"

namespace jase {

/// Log-odds-ratio decomposition of a SNP contrast s0 -> s1 at covariate
/// value x, under the rare-disease approximation. te == de + ie by
/// construction.
struct EffectDecomposition {
  double te = 0.0;
  double de = 0.0;
  double ie = 0.0;
  Eigen::VectorXd s0;
  Eigen::VectorXd s1;
  Eigen::VectorXd x;
  bool rare_disease_approximation = true;
};

EffectDecomposition effects(const MediationCoefficients& mc,
                            const Eigen::VectorXd& s0,
                            const Eigen::VectorXd& s1,
                            const Eigen::VectorXd& x);

/// The SNP-only model induced by marginalizing expression out of the
/// joint models when there is no SNP-by-expression interaction:
///   logit P(Y|S,X) ~ c { X'(alpha + beta_g phi) + S'(beta_s + beta_g delta) }
/// with attenuation c = (1 + 0.35 sigma2_g beta_g^2)^{-1/2}.
struct MarginalSnpModel {
  double c = 1.0;
  Eigen::VectorXd beta_star;   // c (beta_s + beta_g delta)
  Eigen::VectorXd alpha_star;  // c (alpha + beta_g phi)
};

/// Requires gamma == 0; with interactions use marginal_snp_linpred.
MarginalSnpModel marginal_snp_coefficients(const MediationCoefficients& mc);

/// Linear predictor of the induced SNP-only model in the general
/// (interaction) case:
///   c*(s) { x'(alpha + phi beta_g) + s'(beta_s + delta beta_g)
///           + x'phi s'gamma + s'delta s'gamma },
///   c*(s) = {1 + 0.35 sigma2_g (beta_g + s'gamma)^2}^{-1/2}.
double marginal_snp_linpred(const MediationCoefficients& mc,
                            const Eigen::VectorXd& s,
                            const Eigen::VectorXd& x);

}  // namespace jase
