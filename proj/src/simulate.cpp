#include "jase/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "jase/error.hpp"
#include "jase/omnibus.hpp"
#include "jase/parallel.hpp"
#include "jase/rng.hpp"
#include "jase/special.hpp"

namespace jase {

HaplotypePool load_haplotype_pool(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::Io, "cannot open haplotype pool: " + path);
  }
  Eigen::Index h = 0;
  Eigen::Index l = 0;
  in >> h >> l;
  if (!in || h < 1 || l < 1) {
    raise(ErrorCode::Parse, "haplotype pool header must be 'H L'");
  }
  HaplotypePool pool;
  pool.haplotypes.resize(h, l);
  for (Eigen::Index i = 0; i < h; ++i) {
    for (Eigen::Index j = 0; j < l; ++j) {
      int bit = -1;
      in >> bit;
      if (!in || (bit != 0 && bit != 1)) {
        raise(ErrorCode::Parse, "haplotype pool entries must be bits");
      }
      pool.haplotypes(i, j) = static_cast<std::uint8_t>(bit);
    }
  }
  return pool;
}

Eigen::Index ld_n_loci(const LdModel& ld) {
  return std::visit([](const auto& m) { return m.n_loci(); }, ld);
}

const std::vector<Eigen::Index>& ld_typed(const LdModel& ld) {
  return std::visit(
      [](const auto& m) -> const std::vector<Eigen::Index>& { return m.typed; },
      ld);
}

const std::vector<Eigen::Index>& ld_causal(const LdModel& ld) {
  return std::visit(
      [](const auto& m) -> const std::vector<Eigen::Index>& {
        return m.causal;
      },
      ld);
}

OutcomeLink outcome_link_from_string(const std::string& name) {
  if (name == "logit") return OutcomeLink::Logit;
  if (name == "probit") return OutcomeLink::Probit;
  if (name == "power") return OutcomeLink::PowerLink;
  raise(ErrorCode::Config, "unknown outcome link: " + name);
}

ExpressionNoise expression_noise_from_string(const std::string& name) {
  if (name == "normal") return ExpressionNoise::Normal;
  if (name == "normal_plus_uniform") return ExpressionNoise::NormalPlusUniform;
  raise(ErrorCode::Config, "unknown expression noise: " + name);
}

namespace {

void check_indices(const std::vector<Eigen::Index>& idx, Eigen::Index l,
                   const char* what) {
  for (Eigen::Index i : idx) {
    if (i < 0 || i >= l) {
      raise(ErrorCode::Config,
            std::string(what) + " index out of range: " + std::to_string(i));
    }
  }
}

std::vector<double> resolve_per(const std::vector<double>& per, double scalar,
                                std::size_t count, const char* what) {
  if (per.empty()) {
    return std::vector<double>(count, scalar);
  }
  if (per.size() != count) {
    raise(ErrorCode::Config, std::string(what) +
                                 " per-locus values do not match the causal "
                                 "index count");
  }
  return per;
}

Eigen::MatrixXd draw_genotypes(const LdModel& ld, Eigen::Index n, Rng& rng) {
  if (const auto* pool = std::get_if<HaplotypePool>(&ld)) {
    const Eigen::Index h = pool->n_haplotypes();
    const Eigen::Index l = pool->n_loci();
    Eigen::MatrixXd s(n, l);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto h1 = static_cast<Eigen::Index>(rng.integer_below(h));
      const auto h2 = static_cast<Eigen::Index>(rng.integer_below(h));
      for (Eigen::Index j = 0; j < l; ++j) {
        s(i, j) = static_cast<double>(pool->haplotypes(h1, j) +
                                      pool->haplotypes(h2, j));
      }
    }
    return s;
  }

  const auto& lg = std::get<LatentGaussian>(ld);
  if (!(lg.rho > -1.0 && lg.rho < 1.0)) {
    raise(ErrorCode::Config, "latent Gaussian rho must lie in (-1,1)");
  }
  const Eigen::Index l = lg.n_loci();
  Eigen::VectorXd thresholds(l);
  for (Eigen::Index j = 0; j < l; ++j) {
    const double maf = lg.mafs[j];
    if (!(maf > 0.0 && maf <= 0.5)) {
      raise(ErrorCode::Config, "minor allele frequencies must lie in (0,0.5]");
    }
    thresholds[j] = normal_quantile(maf);
  }
  const double innov = std::sqrt(1.0 - lg.rho * lg.rho);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, l);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int copy = 0; copy < 2; ++copy) {
      double z = rng.normal();
      s(i, 0) += (z < thresholds[0]) ? 1.0 : 0.0;
      for (Eigen::Index j = 1; j < l; ++j) {
        z = lg.rho * z + innov * rng.normal();
        s(i, j) += (z < thresholds[j]) ? 1.0 : 0.0;
      }
    }
  }
  return s;
}

}  // namespace

Cohort generate_cohort(const LdModel& ld, const GenerativeModel& gm,
                       Eigen::Index cohort_n, std::uint64_t seed) {
  const Eigen::Index l = ld_n_loci(ld);
  const auto& causal = ld_causal(ld);
  check_indices(causal, l, "causal");
  check_indices(ld_typed(ld), l, "typed");

  const auto beta_s =
      resolve_per(gm.beta_s_per, gm.beta_s, causal.size(), "beta_s");
  const auto gamma =
      resolve_per(gm.gamma_per, gm.gamma, causal.size(), "gamma");
  const auto delta =
      resolve_per(gm.delta_per, gm.delta, causal.size(), "delta");

  Rng geno_rng(substream(seed, 1));
  Rng expr_rng(substream(seed, 2));
  Rng outcome_rng(substream(seed, 3));

  Cohort cohort;
  cohort.s_all = draw_genotypes(ld, cohort_n, geno_rng);
  cohort.g.resize(cohort_n);
  cohort.y.resize(cohort_n);

  const double g_sd = std::sqrt(gm.sigma2_g);
  for (Eigen::Index i = 0; i < cohort_n; ++i) {
    double g = 0.0;
    for (std::size_t j = 0; j < causal.size(); ++j) {
      g += delta[j] * cohort.s_all(i, causal[j]);
    }
    g += g_sd * expr_rng.normal();
    if (gm.expression_noise == ExpressionNoise::NormalPlusUniform) {
      g += expr_rng.uniform(-gm.uniform_halfwidth, gm.uniform_halfwidth);
    }
    cohort.g[i] = g;

    double lin = gm.beta_g * g;
    for (std::size_t j = 0; j < causal.size(); ++j) {
      const double dose = cohort.s_all(i, causal[j]);
      lin += beta_s[j] * dose + gamma[j] * g * dose;
    }

    double prob = 0.0;
    switch (gm.link) {
      case OutcomeLink::Logit:
        prob = expit(gm.intercept_y + lin);
        break;
      case OutcomeLink::Probit:
        prob = normal_cdf(gm.intercept_y + lin);
        break;
      case OutcomeLink::PowerLink: {
        const double base = gm.power_shift + lin;
        if (base <= 0.0) {
          raise(ErrorCode::InvalidValue,
                "power link base went non-positive; shrink the effects");
        }
        prob = expit(-std::pow(gm.power_shift, gm.power_exponent) +
                     std::pow(base, gm.power_exponent));
        break;
      }
    }
    cohort.y[i] = outcome_rng.bernoulli(prob) ? 1.0 : 0.0;
  }
  return cohort;
}

Dataset sample_case_control(const Cohort& cohort,
                            const std::vector<Eigen::Index>& typed,
                            Eigen::Index n_cases, Eigen::Index n_controls,
                            std::uint64_t seed) {
  if (typed.empty()) {
    raise(ErrorCode::Config, "no typed loci selected");
  }
  check_indices(typed, cohort.s_all.cols(), "typed");

  std::vector<Eigen::Index> cases;
  std::vector<Eigen::Index> controls;
  for (Eigen::Index i = 0; i < cohort.y.size(); ++i) {
    (cohort.y[i] == 1.0 ? cases : controls).push_back(i);
  }
  if (static_cast<Eigen::Index>(cases.size()) < n_cases ||
      static_cast<Eigen::Index>(controls.size()) < n_controls) {
    std::ostringstream msg;
    msg << "cohort holds " << cases.size() << " cases / " << controls.size()
        << " controls; requested " << n_cases << " / " << n_controls;
    raise(ErrorCode::Insufficient, msg.str());
  }

  Rng rng(substream(seed, 4));
  auto draw = [&rng](std::vector<Eigen::Index>& from, Eigen::Index count) {
    // partial Fisher-Yates: the first `count` entries become the sample
    for (Eigen::Index i = 0; i < count; ++i) {
      const auto j =
          i + static_cast<Eigen::Index>(rng.integer_below(from.size() - i));
      std::swap(from[i], from[j]);
    }
    from.resize(count);
  };
  draw(cases, n_cases);
  draw(controls, n_controls);

  const Eigen::Index n = n_cases + n_controls;
  Eigen::VectorXd y(n);
  Eigen::VectorXd g(n);
  Eigen::MatrixXd s(n, static_cast<Eigen::Index>(typed.size()));
  Eigen::Index row = 0;
  for (const auto& grp : {cases, controls}) {
    for (Eigen::Index idx : grp) {
      y[row] = cohort.y[idx];
      g[row] = cohort.g[idx];
      for (std::size_t j = 0; j < typed.size(); ++j) {
        s(row, static_cast<Eigen::Index>(j)) = cohort.s_all(idx, typed[j]);
      }
      ++row;
    }
  }
  return make_dataset(std::move(y), std::move(s), std::move(g),
                      Eigen::MatrixXd::Ones(n, 1));
}

const char* to_string(ExperimentTest t) noexcept {
  switch (t) {
    case ExperimentTest::QS: return "qs";
    case ExperimentTest::QSgWeighted: return "qsg_weighted";
    case ExperimentTest::QSgUnweighted: return "qsg_unweighted";
    case ExperimentTest::QSgcWeighted: return "qsgc_weighted";
    case ExperimentTest::QSgcUnweighted: return "qsgc_unweighted";
    case ExperimentTest::Omnibus: return "omnibus";
    case ExperimentTest::QDe: return "qde";
    case ExperimentTest::QIe: return "qie";
  }
  return "?";
}

ExperimentTest experiment_test_from_string(const std::string& name) {
  for (ExperimentTest t :
       {ExperimentTest::QS, ExperimentTest::QSgWeighted,
        ExperimentTest::QSgUnweighted, ExperimentTest::QSgcWeighted,
        ExperimentTest::QSgcUnweighted, ExperimentTest::Omnibus,
        ExperimentTest::QDe, ExperimentTest::QIe}) {
    if (name == to_string(t)) return t;
  }
  raise(ErrorCode::Config, "unknown test name: " + name);
}

namespace {

/// All requested p-values for one replicate. Perturbation p-values use a
/// noise stream derived from rep_seed, shared across the weighted trio by
/// omnibus_test and regenerated identically for the other tests.
void replicate_pvalues(const ExperimentConfig& config,
                       const GenerativeModel& gm, std::uint64_t rep_seed,
                       double* out) {
  const Cohort cohort =
      generate_cohort(config.ld, gm, config.cohort_n, substream(rep_seed, 1));
  const Dataset d =
      sample_case_control(cohort, ld_typed(config.ld), config.n_cases,
                          config.n_controls, substream(rep_seed, 2));
  const std::uint64_t test_seed = substream(rep_seed, 3);

  bool need_omnibus_parts = false;
  for (const ExperimentTest t : config.tests) {
    if (t == ExperimentTest::QS || t == ExperimentTest::QSgWeighted ||
        t == ExperimentTest::QSgcWeighted || t == ExperimentTest::Omnibus) {
      need_omnibus_parts = true;
    }
  }
  OmnibusResult omni;
  if (need_omnibus_parts) {
    omni = omnibus_test(d, config.b, test_seed, /*analytic_pvalues=*/false);
  }

  TestOptions opt;
  opt.engine = Engine::Perturbation;
  opt.b = config.b;
  opt.seed = test_seed;

  for (std::size_t t = 0; t < config.tests.size(); ++t) {
    switch (config.tests[t]) {
      case ExperimentTest::QS:
        out[t] = omni.p_s;
        break;
      case ExperimentTest::QSgWeighted:
        out[t] = omni.p_sg;
        break;
      case ExperimentTest::QSgcWeighted:
        out[t] = omni.p_sgc;
        break;
      case ExperimentTest::Omnibus:
        out[t] = omni.p_omnibus;
        break;
      case ExperimentTest::QSgUnweighted: {
        opt.weighting = WeightingMode::Unweighted;
        out[t] = run_variant_test(d, StatVariant::SG, opt).p_perturbation;
        break;
      }
      case ExperimentTest::QSgcUnweighted: {
        opt.weighting = WeightingMode::Unweighted;
        out[t] = run_variant_test(d, StatVariant::SGC, opt).p_perturbation;
        break;
      }
      case ExperimentTest::QDe: {
        opt.weighting = WeightingMode::Weighted;
        out[t] = direct_effect_test(d, opt).p_perturbation;
        break;
      }
      case ExperimentTest::QIe: {
        opt.weighting = WeightingMode::Weighted;
        out[t] = indirect_effect_test(d, opt).p_perturbation;
        break;
      }
    }
  }
}

}  // namespace

Eigen::MatrixXd experiment_pvalues(const ExperimentConfig& config,
                                   std::size_t grid_index) {
  if (grid_index >= config.grid.size()) {
    raise(ErrorCode::Config, "grid index out of range");
  }
  if (config.replications < 1) {
    raise(ErrorCode::Config, "experiments need at least one replication");
  }
  const GenerativeModel& gm = config.grid[grid_index];
  const auto reps = static_cast<Eigen::Index>(config.replications);
  const auto ntests = static_cast<Eigen::Index>(config.tests.size());

  Eigen::MatrixXd pvals(reps, ntests);
  pvals.setConstant(std::numeric_limits<double>::quiet_NaN());

  const std::uint64_t cell_seed = substream(config.seed, grid_index);
  parallel_for(reps, config.workers, [&](Eigen::Index r) {
    std::vector<double> row(config.tests.size(),
                            std::numeric_limits<double>::quiet_NaN());
    try {
      replicate_pvalues(config, gm, substream(cell_seed, r), row.data());
      for (Eigen::Index t = 0; t < ntests; ++t) {
        pvals(r, t) = row[static_cast<std::size_t>(t)];
      }
    } catch (const Error&) {
      // leave the row NaN; the caller reports it as a failure
    }
  });
  return pvals;
}

RejectionTable size_power_experiment(const ExperimentConfig& config) {
  if (config.replications < 100) {
    raise(ErrorCode::Config, "size/power experiments need >= 100 replications");
  }
  RejectionTable table;
  for (std::size_t cell = 0; cell < config.grid.size(); ++cell) {
    const Eigen::MatrixXd pvals = experiment_pvalues(config, cell);
    for (std::size_t t = 0; t < config.tests.size(); ++t) {
      RejectionRow row;
      row.config_index = cell;
      row.test = config.tests[t];
      row.replications = config.replications;
      for (Eigen::Index r = 0; r < pvals.rows(); ++r) {
        const double p = pvals(r, static_cast<Eigen::Index>(t));
        if (std::isnan(p)) {
          ++row.failures;
        } else if (p <= config.alpha) {
          ++row.rejections;
        }
      }
      const int valid = row.replications - row.failures;
      row.rate = valid > 0 ? static_cast<double>(row.rejections) / valid : 0.0;
      row.se = valid > 0 ? std::sqrt(row.rate * (1.0 - row.rate) / valid) : 0.0;
      table.rows.push_back(row);
    }
  }
  return table;
}

}  // namespace jase
