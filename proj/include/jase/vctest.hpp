#pragma once

#include <Eigen/Core>

#include "jase/dataset.hpp"
#include "jase/glm.hpp"

namespace jase {

/// Which disease-model kernel the statistic uses: SNPs only, SNPs plus
/// expression, or SNPs plus expression plus their interactions.
enum class StatVariant { S, SG, SGC };

enum class WeightingMode { Weighted, Unweighted };

const char* to_string(StatVariant v) noexcept;
const char* to_string(WeightingMode m) noexcept;

/// Scores for the three null-hypothesis blocks and the variances of the
/// corresponding quadratic/linear forms under the null fit.
struct ScoreComponents {
  double u_tau_s = 0.0;  // r' SS' r
  double u_beta_g = 0.0; // G' r
  double u_tau_i = 0.0;  // r' CC' r
  double i_tau_s = 0.0;  // 1'(SS' . K . SS')1
  double i_g = 0.0;      // 1'(GG' . K . GG')1
  double i_tau_i = 0.0;  // 1'(CC' . K . CC')1
};

struct Weights {
  double a1 = 1.0;
  double a2 = 1.0;
  double a3 = 1.0;
  WeightingMode mode = WeightingMode::Unweighted;
};

/// The variance kernel of squared centered Bernoulli residuals:
/// k_ii = mu(1-mu)(2mu-1)^2 on the diagonal and
/// k_ii' = 2 [mu_i(1-mu_i)][mu_i'(1-mu_i')] off it. Materializes the full
/// n x n matrix; intended for small n and for tests.
Eigen::MatrixXd k_matrix(const Eigen::VectorXd& mu0);

/// 1'(FF' . K . FF')1 for the kernel FF' of factor matrix f (n x k),
/// computed blockwise without materializing any n x n matrix.
double kernel_variance(const Eigen::MatrixXd& f, const Eigen::VectorXd& mu0);

/// All six score/variance components from the residuals y - mu0.
ScoreComponents score_components(const Dataset& d, const Eigen::MatrixXd& c,
                                 const NullFit& nf);

/// a1 = 1 always; in weighted mode a2 = (I_G/I_tauS)^(-1/2) and
/// a3 = (I_tauI/I_tauS)^(-1/2). Throws if a weighted denominator is zero.
Weights make_weights(const ScoreComponents& sc, WeightingMode mode);

/// Q = n^{-1} (a1 U_tauS + a2 U_betaG^2 + a3 U_tauI), dropping the terms
/// the variant excludes.
double q_statistic(const ScoreComponents& sc, const Weights& w, StatVariant v,
                   Eigen::Index n);

}  // namespace jase
