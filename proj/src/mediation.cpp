#include "jase/mediation.hpp"

#include <cmath>

#include "jase/error.hpp"

namespace jase {

namespace {

void check_dims(const MediationCoefficients& mc, const Eigen::VectorXd& s,
                const Eigen::VectorXd& x) {
  if (s.size() != mc.beta_s.size() || s.size() != mc.delta.size() ||
      s.size() != mc.gamma.size()) {
    raise(ErrorCode::Dimension, "SNP vector length does not match coefficients");
  }
  if (x.size() != mc.alpha.size() || x.size() != mc.phi.size()) {
    raise(ErrorCode::Dimension,
          "covariate vector length does not match coefficients");
  }
}

}  // namespace

EffectDecomposition effects(const MediationCoefficients& mc,
                            const Eigen::VectorXd& s0,
                            const Eigen::VectorXd& s1,
                            const Eigen::VectorXd& x) {
  if (s0.size() != s1.size()) {
    raise(ErrorCode::Dimension, "contrast endpoints differ in length");
  }
  check_dims(mc, s0, x);

  const Eigen::VectorXd diff = s1 - s0;
  const double level = x.dot(mc.phi) + s0.dot(mc.delta) +
                       mc.beta_g * mc.sigma2_g;
  const double gamma_quad = 0.5 * mc.sigma2_g * ((s1 + s0).dot(mc.gamma)) *
                            (diff.dot(mc.gamma));

  EffectDecomposition out;
  out.s0 = s0;
  out.s1 = s1;
  out.x = x;
  out.de = diff.dot(mc.beta_s) + diff.dot(mc.gamma) * level + gamma_quad;
  out.ie = diff.dot(mc.delta) * (mc.beta_g + s1.dot(mc.gamma));
  out.te = out.de + out.ie;
  return out;
}

MarginalSnpModel marginal_snp_coefficients(const MediationCoefficients& mc) {
  if (mc.gamma.cwiseAbs().maxCoeff() != 0.0) {
    raise(ErrorCode::InvalidValue,
          "induced coefficients require gamma == 0; use marginal_snp_linpred");
  }
  MarginalSnpModel out;
  out.c = 1.0 / std::sqrt(1.0 + 0.35 * mc.sigma2_g * mc.beta_g * mc.beta_g);
  out.beta_star = out.c * (mc.beta_s + mc.beta_g * mc.delta);
  out.alpha_star = out.c * (mc.alpha + mc.beta_g * mc.phi);
  return out;
}

double marginal_snp_linpred(const MediationCoefficients& mc,
                            const Eigen::VectorXd& s,
                            const Eigen::VectorXd& x) {
  check_dims(mc, s, x);
  const double sg = s.dot(mc.gamma);
  const double cstar =
      1.0 / std::sqrt(1.0 + 0.35 * mc.sigma2_g * (mc.beta_g + sg) *
                                (mc.beta_g + sg));
  const double lin = x.dot(mc.alpha + mc.phi * mc.beta_g) +
                     s.dot(mc.beta_s + mc.delta * mc.beta_g) +
                     x.dot(mc.phi) * sg + s.dot(mc.delta) * sg;
  return cstar * lin;
}

}  // namespace jase
