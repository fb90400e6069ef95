#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "jase/dataset.hpp"
#include "jase/glm.hpp"
#include "jase/nulldist.hpp"
#include "jase/vctest.hpp"

namespace jase {

enum class Engine { Satterthwaite, Davies, Perturbation, All };

const char* to_string(Engine e) noexcept;

/// Which statistic a TestResult reports.
enum class TestKind { S, SG, SGC, DE, IE };

const char* to_string(TestKind k) noexcept;

struct TestResult {
  TestKind kind = TestKind::S;
  WeightingMode weighting = WeightingMode::Weighted;
  double q = 0.0;
  Eigen::VectorXd lambdas;

  // NaN when an engine was not requested.
  double p_satterthwaite;
  double p_davies;
  double p_perturbation;
  bool davies_fallback = false;  // Davies failed, Satterthwaite substituted
  int b = 0;

  /// The p-value a scan/report should use, preferring the requested
  /// engine (Davies when `all`).
  [[nodiscard]] double preferred_pvalue(Engine e) const;
};

struct TestOptions {
  WeightingMode weighting = WeightingMode::Weighted;
  Engine engine = Engine::All;
  int b = 1000;                 // perturbation replicates
  std::uint64_t seed = 0;
  double ridge = 0.0;           // null-model penalty for DE/IE
  double davies_accuracy = 1e-6;
};

/// Single-variant test (S, SG, or SGC) under the covariate-only null.
TestResult run_variant_test(const Dataset& d, StatVariant v,
                            const TestOptions& options);

/// Q_DE = n^{-1}(a1 U_tauS + a3 U_tauI); null model logistic on [X G].
TestResult direct_effect_test(const Dataset& d, const TestOptions& options);

/// Q_IE = n^{-1}(a2 U_betaG^2 + a3 U_tauI); null model logistic on [X S].
TestResult indirect_effect_test(const Dataset& d, const TestOptions& options);

struct OmnibusResult {
  double p_s = 1.0;
  double p_sg = 1.0;
  double p_sgc = 1.0;
  double p_min_observed = 1.0;
  double p_omnibus = 1.0;
  int b = 0;
  TestResult per_variant[3];  // S, SG, SGC
};

/// Min-p omnibus over Q_S, weighted Q_SG and weighted Q_SGC. One noise
/// matrix is shared across the three perturbation runs so the joint null
/// preserves their correlation; identical seeds give identical results.
/// analytic_pvalues additionally fills the per-variant Satterthwaite and
/// Davies entries (simulation loops turn it off).
OmnibusResult omnibus_test(const Dataset& d, int b, std::uint64_t seed,
                           bool analytic_pvalues = true);

}  // namespace jase
