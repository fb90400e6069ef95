#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "jase/dataset.hpp"

namespace jase {

/// Resampling pool of binary haplotypes (rows) over L loci. Subjects are
/// formed by summing two uniformly drawn haplotypes, so LD follows the
/// pool's block structure. typed marks the loci visible to the tests;
/// causal marks the loci driving expression and outcome.
struct HaplotypePool {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> haplotypes;
  std::vector<Eigen::Index> typed;
  std::vector<Eigen::Index> causal;

  [[nodiscard]] Eigen::Index n_haplotypes() const { return haplotypes.rows(); }
  [[nodiscard]] Eigen::Index n_loci() const { return haplotypes.cols(); }
};

/// File format: header "H L", then H lines of L space-separated bits.
/// typed/causal come from the experiment config, not the file.
HaplotypePool load_haplotype_pool(const std::string& path);

/// Parametric alternative: AR(1) latent normals thresholded at the
/// per-locus minor-allele-frequency quantile; two independent copies sum
/// to the dosage.
struct LatentGaussian {
  double rho = 0.0;        // in (-1, 1)
  Eigen::VectorXd mafs;    // each in (0, 0.5]
  std::vector<Eigen::Index> typed;
  std::vector<Eigen::Index> causal;

  [[nodiscard]] Eigen::Index n_loci() const { return mafs.size(); }
};

using LdModel = std::variant<HaplotypePool, LatentGaussian>;

Eigen::Index ld_n_loci(const LdModel& ld);
const std::vector<Eigen::Index>& ld_typed(const LdModel& ld);
const std::vector<Eigen::Index>& ld_causal(const LdModel& ld);

enum class OutcomeLink { Logit, Probit, PowerLink };
enum class ExpressionNoise { Normal, NormalPlusUniform };

OutcomeLink outcome_link_from_string(const std::string& name);
ExpressionNoise expression_noise_from_string(const std::string& name);

/// One causal configuration for expression and outcome. Scalars apply to
/// every causal locus; the *_per vectors override them entry by entry.
struct GenerativeModel {
  double beta_s = 0.0;
  double beta_g = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  std::vector<double> beta_s_per;
  std::vector<double> gamma_per;
  std::vector<double> delta_per;

  double intercept_y = -0.2;
  double sigma2_g = 1.44;
  OutcomeLink link = OutcomeLink::Logit;
  ExpressionNoise expression_noise = ExpressionNoise::Normal;
  double power_exponent = 0.9;   // PowerLink: logit P = -shift^e + (shift+lin)^e
  double power_shift = 100.0;
  double uniform_halfwidth = 0.3;
};

/// Genotypes at every locus plus expression and outcome for cohort_n
/// subjects. Deterministic in (ld, gm, cohort_n, seed).
struct Cohort {
  Eigen::MatrixXd s_all;  // cohort_n x L dosages
  Eigen::VectorXd g;
  Eigen::VectorXd y;
};

Cohort generate_cohort(const LdModel& ld, const GenerativeModel& gm,
                       Eigen::Index cohort_n, std::uint64_t seed);

/// Outcome-stratified subsample restricted to the typed loci;
/// intercept-only covariates. Throws Insufficient when a class is too
/// small.
Dataset sample_case_control(const Cohort& cohort,
                            const std::vector<Eigen::Index>& typed,
                            Eigen::Index n_cases, Eigen::Index n_controls,
                            std::uint64_t seed);

/// Test labels accepted by experiments and the power CLI command.
enum class ExperimentTest {
  QS,
  QSgWeighted,
  QSgUnweighted,
  QSgcWeighted,
  QSgcUnweighted,
  Omnibus,
  QDe,
  QIe,
};

const char* to_string(ExperimentTest t) noexcept;
ExperimentTest experiment_test_from_string(const std::string& name);

struct ExperimentConfig {
  LdModel ld;
  std::vector<GenerativeModel> grid;
  std::vector<ExperimentTest> tests;
  Eigen::Index cohort_n = 1000;
  Eigen::Index n_cases = 100;
  Eigen::Index n_controls = 100;
  int replications = 2000;
  int b = 500;               // perturbation replicates per test
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int workers = 0;           // 0: decide from env/hardware
};

struct RejectionRow {
  std::size_t config_index = 0;
  ExperimentTest test;
  int replications = 0;
  int rejections = 0;
  int failures = 0;   // replicates whose fit/test errored
  double rate = 0.0;
  double se = 0.0;
};

struct RejectionTable {
  std::vector<RejectionRow> rows;
};

/// Per-replicate p-values for one grid cell (column order = config.tests;
/// NaN marks a failed replicate). Per-replicate RNG streams derive from
/// (seed, grid index, replicate) so worker scheduling cannot change any
/// number.
Eigen::MatrixXd experiment_pvalues(const ExperimentConfig& config,
                                   std::size_t grid_index);

/// Empirical rejection rates at level alpha, per (grid cell, test).
RejectionTable size_power_experiment(const ExperimentConfig& config);

}  // namespace jase
