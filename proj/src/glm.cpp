#include "jase/glm.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "jase/error.hpp"
#include "jase/special.hpp"

namespace jase {

namespace {

constexpr double kSeparationTol = 1e-10;

Eigen::VectorXd fitted_probs(const Eigen::MatrixXd& design,
                             const Eigen::VectorXd& beta) {
  Eigen::VectorXd eta = design * beta;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    eta[i] = expit(eta[i]);
  }
  return eta;
}

}  // namespace

double logistic_loglik(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = design * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    // y*eta - log(1 + exp(eta)), stable for large |eta|
    const double e = eta[i];
    const double log1pexp = e > 0.0 ? e + std::log1p(std::exp(-e))
                                    : std::log1p(std::exp(e));
    ll += y[i] * e - log1pexp;
  }
  return ll;
}

NullFit fit_logistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                     const LogisticOptions& options) {
  const Eigen::Index n = design.rows();
  const Eigen::Index k = design.cols();
  if (y.size() != n) {
    raise(ErrorCode::Dimension, "design rows do not match outcome length");
  }

  Eigen::MatrixXd penalty = Eigen::MatrixXd::Zero(k, k);
  if (options.ridge > 0.0) {
    penalty.diagonal().setConstant(options.ridge);
    penalty(0, 0) = 0.0;  // intercept unpenalized
  }

  NullFit fit;
  fit.design = design;
  fit.alpha0 = Eigen::VectorXd::Zero(k);
  double ll = logistic_loglik(design, y, fit.alpha0) -
              0.5 * fit.alpha0.dot(penalty * fit.alpha0);

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const Eigen::VectorXd mu = fitted_probs(design, fit.alpha0);
    const Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
    const Eigen::VectorXd score =
        design.transpose() * (y - mu) - penalty * fit.alpha0;

    fit.iterations = iter;
    if (score.cwiseAbs().maxCoeff() < options.tol) {
      fit.converged = true;
      break;
    }

    Eigen::MatrixXd info =
        design.transpose() * w.asDiagonal() * design + penalty;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success ||
        (ldlt.vectorD().array() < 1e-12 * info.diagonal().maxCoeff()).any()) {
      if (options.ridge > 0.0) {
        raise(ErrorCode::RankDeficient,
              "logistic information matrix singular even with ridge penalty");
      }
      raise(ErrorCode::RankDeficient,
            "design matrix is rank deficient; supply a ridge penalty");
    }
    const Eigen::VectorXd step = ldlt.solve(score);

    // Step-halving keeps the penalized log-likelihood non-decreasing.
    double scale = 1.0;
    Eigen::VectorXd candidate;
    double ll_new;
    for (int h = 0; h < 12; ++h) {
      candidate = fit.alpha0 + scale * step;
      ll_new = logistic_loglik(design, y, candidate) -
               0.5 * candidate.dot(penalty * candidate);
      if (ll_new >= ll - 1e-12) break;
      scale *= 0.5;
    }
    fit.alpha0 = candidate;
    ll = ll_new;
  }

  fit.mu0 = fitted_probs(design, fit.alpha0);
  fit.loglik = logistic_loglik(design, y, fit.alpha0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (fit.mu0[i] < kSeparationTol || fit.mu0[i] > 1.0 - kSeparationTol) {
      fit.separated = true;
      fit.converged = false;
    }
    // keep mu strictly interior for downstream variance terms
    fit.mu0[i] = std::min(1.0 - 1e-12, std::max(1e-12, fit.mu0[i]));
  }
  return fit;
}

NullFit fit_null_logistic(const Dataset& d, const Eigen::MatrixXd& extra_columns,
                          const LogisticOptions& options) {
  if (extra_columns.size() == 0) {
    return fit_logistic(d.x, d.y, options);
  }
  if (extra_columns.rows() != d.n()) {
    raise(ErrorCode::Dimension, "extra null-model columns have wrong length");
  }
  Eigen::MatrixXd design(d.n(), d.q() + extra_columns.cols());
  design << d.x, extra_columns;
  return fit_logistic(design, d.y, options);
}

MediationCoefficients fit_full_models(const Dataset& d, double ridge) {
  const Eigen::Index n = d.n();
  const Eigen::Index p = d.p();
  const Eigen::Index q = d.q();

  const Eigen::MatrixXd c = interaction_matrix(d);
  Eigen::MatrixXd design(n, q + 2 * p + 1);
  design << d.x, d.s, d.g, c;

  LogisticOptions opt;
  opt.ridge = ridge;
  const NullFit outcome = fit_logistic(design, d.y, opt);
  if (outcome.separated) {
    raise(ErrorCode::Separation,
          "outcome model is separated; coefficients are unbounded");
  }
  if (!outcome.converged) {
    raise(ErrorCode::NotConverged, "outcome model did not converge");
  }

  MediationCoefficients mc;
  mc.alpha = outcome.alpha0.segment(0, q);
  mc.beta_s = outcome.alpha0.segment(q, p);
  mc.beta_g = outcome.alpha0[q + p];
  mc.gamma = outcome.alpha0.segment(q + p + 1, p);

  // Expression model: OLS of G on [X S].
  Eigen::MatrixXd xs(n, q + p);
  xs << d.x, d.s;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
  if (ridge <= 0.0 && qr.rank() < xs.cols()) {
    raise(ErrorCode::RankDeficient,
          "[X S] is rank deficient; supply a ridge penalty");
  }
  Eigen::VectorXd coef;
  if (ridge > 0.0) {
    Eigen::MatrixXd gram = xs.transpose() * xs;
    for (Eigen::Index j = 1; j < gram.rows(); ++j) {
      gram(j, j) += ridge;
    }
    coef = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(xs.transpose() * d.g);
  } else {
    coef = qr.solve(d.g);
  }
  mc.phi = coef.segment(0, q);
  mc.delta = coef.segment(q, p);

  const Eigen::VectorXd resid = d.g - xs * coef;
  const Eigen::Index dof = n - q - p;
  if (dof <= 0) {
    raise(ErrorCode::Dimension,
          "expression model has no residual degrees of freedom");
  }
  mc.sigma2_g = resid.squaredNorm() / static_cast<double>(dof);
  return mc;
}

}  // namespace jase
