#include "jase/omnibus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "jase/error.hpp"
#include "jase/rng.hpp"

namespace jase {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void attach_analytic_pvalues(TestResult& res, const ProjectedKernel& pk,
                             const TestOptions& opt) {
  const Spectrum spec = spectrum(pk);
  res.lambdas = spec.lambdas;
  const bool want_satt =
      opt.engine == Engine::Satterthwaite || opt.engine == Engine::All;
  const bool want_davies =
      opt.engine == Engine::Davies || opt.engine == Engine::All;
  if (want_satt || want_davies) {
    const double satt = pvalue_satterthwaite(spec, res.q);
    if (want_satt) res.p_satterthwaite = satt;
    if (want_davies) {
      try {
        res.p_davies = pvalue_davies(spec, res.q, opt.davies_accuracy);
      } catch (const Error&) {
        res.p_davies = satt;
        res.davies_fallback = true;
      }
    }
  }
}

void attach_perturbation_pvalue(TestResult& res, const ProjectedKernel& pk,
                                const Eigen::VectorXd& residuals,
                                const TestOptions& opt) {
  if (opt.engine != Engine::Perturbation && opt.engine != Engine::All) {
    return;
  }
  const Eigen::MatrixXd noise =
      standard_normal_matrix(opt.b, residuals.size(), substream(opt.seed, 0));
  const Eigen::VectorXd draws =
      perturbation_null_draws(pk, residuals, noise);
  res.p_perturbation = pvalue_perturbation(draws, res.q);
  res.b = opt.b;
}

TestResult blank_result(TestKind kind, WeightingMode mode) {
  TestResult res;
  res.kind = kind;
  res.weighting = mode;
  res.p_satterthwaite = kNan;
  res.p_davies = kNan;
  res.p_perturbation = kNan;
  return res;
}

/// Empirical survival of sorted draws with the add-one rule; ties count
/// as >=. Used both for observed statistics and for replicate draws.
class SurvivalFn {
 public:
  explicit SurvivalFn(const Eigen::VectorXd& draws)
      : sorted_(draws.data(), draws.data() + draws.size()) {
    std::sort(sorted_.begin(), sorted_.end());
  }

  [[nodiscard]] double operator()(double q) const {
    const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), q);
    const auto count = sorted_.end() - it;  // draws >= q
    return static_cast<double>(1 + count) /
           static_cast<double>(sorted_.size() + 1);
  }

 private:
  std::vector<double> sorted_;
};

}  // namespace

const char* to_string(Engine e) noexcept {
  switch (e) {
    case Engine::Satterthwaite: return "satterthwaite";
    case Engine::Davies: return "davies";
    case Engine::Perturbation: return "perturbation";
    case Engine::All: return "all";
  }
  return "?";
}

const char* to_string(TestKind k) noexcept {
  switch (k) {
    case TestKind::S: return "s";
    case TestKind::SG: return "sg";
    case TestKind::SGC: return "sgc";
    case TestKind::DE: return "de";
    case TestKind::IE: return "ie";
  }
  return "?";
}

double TestResult::preferred_pvalue(Engine e) const {
  switch (e) {
    case Engine::Satterthwaite: return p_satterthwaite;
    case Engine::Perturbation: return p_perturbation;
    case Engine::Davies:
    case Engine::All: return p_davies;
  }
  return p_davies;
}

TestResult run_variant_test(const Dataset& d, StatVariant v,
                            const TestOptions& opt) {
  const Eigen::MatrixXd c = interaction_matrix(d);
  const NullFit nf = fit_null_logistic(d);
  const ScoreComponents sc = score_components(d, c, nf);
  const Weights w = make_weights(sc, opt.weighting);

  TestKind kind = TestKind::S;
  if (v == StatVariant::SG) kind = TestKind::SG;
  if (v == StatVariant::SGC) kind = TestKind::SGC;
  TestResult res = blank_result(kind, opt.weighting);
  res.q = q_statistic(sc, w, v, d.n());

  const ProjectedKernel pk = projected_kernel(d, c, nf, w, v);
  attach_analytic_pvalues(res, pk, opt);
  attach_perturbation_pvalue(res, pk, d.y - nf.mu0, opt);
  return res;
}

namespace {

TestResult effect_test(const Dataset& d, TestKind kind,
                       const TestOptions& opt) {
  const Eigen::Index n = d.n();
  const Eigen::MatrixXd c = interaction_matrix(d);

  LogisticOptions lopt;
  lopt.ridge = opt.ridge;
  const Eigen::MatrixXd extra = (kind == TestKind::DE)
                                    ? Eigen::MatrixXd(d.g)
                                    : Eigen::MatrixXd(d.s);
  const NullFit nf = fit_null_logistic(d, extra, lopt);
  const ScoreComponents sc = score_components(d, c, nf);
  const Weights w = make_weights(sc, opt.weighting);

  TestResult res = blank_result(kind, opt.weighting);
  Eigen::MatrixXd vmat;
  if (kind == TestKind::DE) {
    res.q = (w.a1 * sc.u_tau_s + w.a3 * sc.u_tau_i) / static_cast<double>(n);
    vmat.resize(n, 2 * d.p());
    vmat << std::sqrt(w.a1) * d.s, std::sqrt(w.a3) * c;
  } else {
    res.q = (w.a2 * sc.u_beta_g * sc.u_beta_g + w.a3 * sc.u_tau_i) /
            static_cast<double>(n);
    vmat.resize(n, d.p() + 1);
    vmat << std::sqrt(w.a2) * d.g, std::sqrt(w.a3) * c;
  }

  const ProjectedKernel pk = projected_kernel(nf.design, vmat, nf.mu0);
  attach_analytic_pvalues(res, pk, opt);
  attach_perturbation_pvalue(res, pk, d.y - nf.mu0, opt);
  return res;
}

}  // namespace

TestResult direct_effect_test(const Dataset& d, const TestOptions& opt) {
  return effect_test(d, TestKind::DE, opt);
}

TestResult indirect_effect_test(const Dataset& d, const TestOptions& opt) {
  return effect_test(d, TestKind::IE, opt);
}

OmnibusResult omnibus_test(const Dataset& d, int b, std::uint64_t seed,
                           bool analytic_pvalues) {
  if (b < 1) {
    raise(ErrorCode::Config, "omnibus requires at least one perturbation");
  }
  const Eigen::Index n = d.n();
  const Eigen::MatrixXd c = interaction_matrix(d);
  const NullFit nf = fit_null_logistic(d);
  const ScoreComponents sc = score_components(d, c, nf);

  // Weighted mode throughout; zero-information components are dropped by
  // zeroing their weight, which makes the affected variants coincide.
  if (sc.i_tau_s <= 0.0) {
    raise(ErrorCode::DegenerateWeights,
          "I_tauS is zero; no usable SNP signal for the omnibus test");
  }
  Weights w;
  w.mode = WeightingMode::Weighted;
  w.a1 = 1.0;
  w.a2 = sc.i_g > 0.0 ? std::sqrt(sc.i_tau_s / sc.i_g) : 0.0;
  w.a3 = sc.i_tau_i > 0.0 ? std::sqrt(sc.i_tau_s / sc.i_tau_i) : 0.0;

  const Eigen::VectorXd residuals = d.y - nf.mu0;
  const Eigen::MatrixXd noise =
      standard_normal_matrix(b, n, substream(seed, 0));

  constexpr StatVariant variants[3] = {StatVariant::S, StatVariant::SG,
                                       StatVariant::SGC};
  constexpr TestKind kinds[3] = {TestKind::S, TestKind::SG, TestKind::SGC};

  OmnibusResult out;
  out.b = b;
  double q_obs[3];
  Eigen::VectorXd draws[3];
  for (int i = 0; i < 3; ++i) {
    q_obs[i] = q_statistic(sc, w, variants[i], n);
    const ProjectedKernel pk = projected_kernel(d, c, nf, w, variants[i]);
    draws[i] = perturbation_null_draws(pk, residuals, noise);

    TestResult res = blank_result(kinds[i], WeightingMode::Weighted);
    res.q = q_obs[i];
    res.b = b;
    res.p_perturbation = pvalue_perturbation(draws[i], q_obs[i]);
    if (analytic_pvalues) {
      const Spectrum spec = spectrum(pk);
      res.lambdas = spec.lambdas;
      res.p_satterthwaite = pvalue_satterthwaite(spec, q_obs[i]);
      try {
        res.p_davies = pvalue_davies(spec, q_obs[i]);
      } catch (const Error&) {
        res.p_davies = res.p_satterthwaite;
        res.davies_fallback = true;
      }
    }
    out.per_variant[i] = res;
  }

  const SurvivalFn surv_s(draws[0]);
  const SurvivalFn surv_sg(draws[1]);
  const SurvivalFn surv_sgc(draws[2]);

  out.p_s = surv_s(q_obs[0]);
  out.p_sg = surv_sg(q_obs[1]);
  out.p_sgc = surv_sgc(q_obs[2]);
  out.p_min_observed = std::min({out.p_s, out.p_sg, out.p_sgc});

  // Replicate-level minima under the shared noise stream.
  Eigen::Index hits = 0;
  for (int bi = 0; bi < b; ++bi) {
    const double pmin =
        std::min({surv_s(draws[0][bi]), surv_sg(draws[1][bi]),
                  surv_sgc(draws[2][bi])});
    if (pmin <= out.p_min_observed) ++hits;
  }
  out.p_omnibus =
      static_cast<double>(1 + hits) / static_cast<double>(b + 1);
  return out;
}

}  // namespace jase
