#include "jase/vctest.hpp"

#include <cmath>

#include "jase/error.hpp"

namespace jase {

const char* to_string(StatVariant v) noexcept {
  switch (v) {
    case StatVariant::S: return "s";
    case StatVariant::SG: return "sg";
    case StatVariant::SGC: return "sgc";
  }
  return "?";
}

const char* to_string(WeightingMode m) noexcept {
  return m == WeightingMode::Weighted ? "weighted" : "unweighted";
}

namespace {

double k_diagonal(double mu) {
  const double w = mu * (1.0 - mu);
  const double t = 2.0 * mu - 1.0;
  return w * t * t;
}

void check_mu(const Eigen::VectorXd& mu0) {
  for (Eigen::Index i = 0; i < mu0.size(); ++i) {
    if (!(mu0[i] > 0.0 && mu0[i] < 1.0)) {
      raise(ErrorCode::InvalidValue, "fitted probabilities must lie in (0,1)");
    }
  }
}

}  // namespace

Eigen::MatrixXd k_matrix(const Eigen::VectorXd& mu0) {
  check_mu(mu0);
  const Eigen::Index n = mu0.size();
  const Eigen::VectorXd w = mu0.array() * (1.0 - mu0.array());
  Eigen::MatrixXd k = 2.0 * w * w.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = k_diagonal(mu0[i]);
  }
  return k;
}

double kernel_variance(const Eigen::MatrixXd& f, const Eigen::VectorXd& mu0) {
  check_mu(mu0);
  const Eigen::Index n = f.rows();
  const Eigen::VectorXd w = mu0.array() * (1.0 - mu0.array());

  // sum_{ii'} (FF')_{ii'}^2 K_{ii'}
  //   = 2 * sum_{i != i'} (FF')^2 w_i w_i' + sum_i (FF')_{ii}^2 k_ii
  // accumulated over row blocks of FF' so memory stays O(block * n).
  constexpr Eigen::Index kBlock = 256;
  double offdiag = 0.0;   // w' (FF' . FF') w including the diagonal
  double diag_w2 = 0.0;   // sum_i (FF')_{ii}^2 w_i^2
  double diag_k = 0.0;    // sum_i (FF')_{ii}^2 k_ii
  for (Eigen::Index start = 0; start < n; start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, n - start);
    const Eigen::MatrixXd block =
        f.middleRows(start, rows) * f.transpose();  // rows x n
    const Eigen::MatrixXd sq = block.array().square();
    offdiag += w.segment(start, rows).dot(sq * w);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index i = start + r;
      diag_w2 += sq(r, i) * w[i] * w[i];
      diag_k += sq(r, i) * k_diagonal(mu0[i]);
    }
  }
  return 2.0 * (offdiag - diag_w2) + diag_k;
}

ScoreComponents score_components(const Dataset& d, const Eigen::MatrixXd& c,
                                 const NullFit& nf) {
  if (!nf.converged) {
    raise(ErrorCode::NotConverged,
          nf.separated ? "null fit is separated" : "null fit did not converge");
  }
  const Eigen::VectorXd r = d.y - nf.mu0;

  ScoreComponents sc;
  sc.u_tau_s = (d.s.transpose() * r).squaredNorm();
  sc.u_beta_g = d.g.dot(r);
  sc.u_tau_i = (c.transpose() * r).squaredNorm();
  sc.i_tau_s = kernel_variance(d.s, nf.mu0);
  sc.i_g = kernel_variance(d.g, nf.mu0);
  sc.i_tau_i = kernel_variance(c, nf.mu0);
  return sc;
}

Weights make_weights(const ScoreComponents& sc, WeightingMode mode) {
  Weights w;
  w.mode = mode;
  if (mode == WeightingMode::Unweighted) {
    return w;
  }
  if (sc.i_tau_s <= 0.0) {
    raise(ErrorCode::DegenerateWeights,
          "I_tauS is zero; weighted statistics are undefined, use unweighted");
  }
  if (sc.i_g <= 0.0) {
    raise(ErrorCode::DegenerateWeights,
          "I_G is zero (degenerate expression); use unweighted");
  }
  if (sc.i_tau_i <= 0.0) {
    raise(ErrorCode::DegenerateWeights,
          "I_tauI is zero (degenerate interactions); use unweighted");
  }
  w.a1 = 1.0;
  w.a2 = std::sqrt(sc.i_tau_s / sc.i_g);
  w.a3 = std::sqrt(sc.i_tau_s / sc.i_tau_i);
  return w;
}

double q_statistic(const ScoreComponents& sc, const Weights& w, StatVariant v,
                   Eigen::Index n) {
  double q = w.a1 * sc.u_tau_s;
  if (v == StatVariant::SG || v == StatVariant::SGC) {
    q += w.a2 * sc.u_beta_g * sc.u_beta_g;
  }
  if (v == StatVariant::SGC) {
    q += w.a3 * sc.u_tau_i;
  }
  return q / static_cast<double>(n);
}

}  // namespace jase
