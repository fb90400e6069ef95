#include "jase/nulldist.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "jase/davies.hpp"
#include "jase/error.hpp"
#include "jase/special.hpp"

namespace jase {

ProjectedKernel projected_kernel(const Eigen::MatrixXd& null_design,
                                 const Eigen::MatrixXd& v,
                                 const Eigen::VectorXd& mu0) {
  const Eigen::Index n = null_design.rows();
  if (v.rows() != n || mu0.size() != n) {
    raise(ErrorCode::Dimension, "projected_kernel: row mismatch");
  }
  const Eigen::Index qn = null_design.cols();
  const Eigen::Index m = v.cols();

  ProjectedKernel pk;
  pk.qn = qn;
  pk.m = m;
  pk.u_mat.resize(n, qn + m);
  pk.u_mat << null_design, v;

  const Eigen::VectorXd w = mu0.array() * (1.0 - mu0.array());
  pk.d_mat = pk.u_mat.transpose() * w.asDiagonal() * pk.u_mat /
             static_cast<double>(n);

  const Eigen::MatrixXd d_xx = pk.d_mat.topLeftCorner(qn, qn);
  const Eigen::MatrixXd d_xv = pk.d_mat.topRightCorner(qn, m);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(d_xx);
  if (!lu.isInvertible()) {
    raise(ErrorCode::RankDeficient,
          "D_XX is singular (collinear null-model covariates)");
  }
  pk.a_mat.resize(m, qn + m);
  pk.a_mat.leftCols(qn) = -(lu.solve(d_xv)).transpose();
  pk.a_mat.rightCols(m).setIdentity();
  return pk;
}

ProjectedKernel projected_kernel(const Dataset& d, const Eigen::MatrixXd& c,
                                 const NullFit& nf, const Weights& w,
                                 StatVariant v) {
  const Eigen::Index n = d.n();
  const Eigen::Index p = d.p();
  Eigen::Index m = p;
  if (v == StatVariant::SG) m = p + 1;
  if (v == StatVariant::SGC) m = 2 * p + 1;

  Eigen::MatrixXd vmat(n, m);
  vmat.leftCols(p) = std::sqrt(w.a1) * d.s;
  if (v != StatVariant::S) {
    vmat.col(p) = std::sqrt(w.a2) * d.g;
  }
  if (v == StatVariant::SGC) {
    vmat.rightCols(p) = std::sqrt(w.a3) * c;
  }
  return projected_kernel(nf.design, vmat, nf.mu0);
}

Spectrum spectrum(const ProjectedKernel& pk, double rel_tol) {
  Eigen::MatrixXd ada = pk.a_mat * pk.d_mat * pk.a_mat.transpose();
  ada = 0.5 * (ada + ada.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ada);
  if (es.info() != Eigen::Success) {
    raise(ErrorCode::DegenerateSpectrum, "eigendecomposition failed");
  }
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  const double lmax = ev[ev.size() - 1];
  if (lmax <= 0.0) {
    raise(ErrorCode::DegenerateSpectrum,
          "projected kernel has no positive eigenvalues");
  }
  const double cutoff = rel_tol * lmax;
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff) ++kept;
  }
  Spectrum spec;
  spec.lambdas.resize(kept);
  for (Eigen::Index i = 0; i < kept; ++i) {
    spec.lambdas[i] = ev[ev.size() - 1 - i];  // descending
  }
  return spec;
}

double pvalue_satterthwaite(const Spectrum& spec, double q_obs) {
  const double e = spec.mean();
  const double v = spec.variance();
  if (e <= 0.0) {
    raise(ErrorCode::DegenerateSpectrum, "spectrum has non-positive mean");
  }
  if (v <= 0.0) {
    raise(ErrorCode::DegenerateSpectrum, "spectrum has zero variance");
  }
  const double kappa = v / (2.0 * e);
  const double nu = 2.0 * e * e / v;
  return chisq_survival(q_obs / kappa, nu);
}

double pvalue_davies(const Spectrum& spec, double q_obs, double accuracy) {
  if (spec.lambdas.size() == 0) {
    raise(ErrorCode::DegenerateSpectrum, "empty spectrum");
  }
  if (q_obs <= 0.0) {
    return 1.0;
  }
  const DaviesResult res =
      davies_qf({spec.lambdas.data(),
                 static_cast<std::size_t>(spec.lambdas.size())},
                q_obs, accuracy, 10000);
  if (res.fault != 0 && res.fault != 2) {
    raise(ErrorCode::NotConverged,
          "characteristic function inversion failed (fault " +
              std::to_string(res.fault) + ")");
  }
  return std::min(1.0, std::max(accuracy, res.p));
}

Eigen::VectorXd perturbation_null_draws(const ProjectedKernel& pk,
                                        const Eigen::VectorXd& residuals,
                                        const Eigen::MatrixXd& noise) {
  const Eigen::Index n = pk.u_mat.rows();
  if (residuals.size() != n || noise.cols() != n) {
    raise(ErrorCode::Dimension, "perturbation_null_draws: shape mismatch");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  // m x n projection of per-subject score contributions
  const Eigen::MatrixXd proj =
      scale * (pk.a_mat * (pk.u_mat.transpose() * residuals.asDiagonal()));
  const Eigen::MatrixXd eps = proj * noise.transpose();  // m x B
  return eps.colwise().squaredNorm().transpose();
}

double pvalue_perturbation(const Eigen::VectorXd& draws, double q_obs) {
  if (draws.size() < 1) {
    raise(ErrorCode::InvalidValue, "no perturbation draws supplied");
  }
  const Eigen::Index b = draws.size();
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < b; ++i) {
    if (draws[i] >= q_obs) ++count;
  }
  return static_cast<double>(1 + count) / static_cast<double>(b + 1);
}

}  // namespace jase
