#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace jase {

enum class GenotypeCoding { Additive, Dominant };

/// Aligned per-subject arrays for one SNP-set / expression pair.
/// Immutable after construction; safe to share across threads.
struct Dataset {
  Eigen::VectorXd y;  // 0/1 disease status, length n
  Eigen::MatrixXd s;  // genotype dosages, n x p
  Eigen::VectorXd g;  // expression, length n
  Eigen::MatrixXd x;  // covariates, n x q, column 0 is the intercept

  std::vector<std::string> snp_ids;  // optional, from the genotype header

  [[nodiscard]] Eigen::Index n() const { return y.size(); }
  [[nodiscard]] Eigen::Index p() const { return s.cols(); }
  [[nodiscard]] Eigen::Index q() const { return x.cols(); }
};

struct LoadOptions {
  GenotypeCoding coding = GenotypeCoding::Additive;
  /// Replace missing genotype entries (NA / . / ?) with the per-SNP mean
  /// instead of rejecting the file.
  bool impute_missing = false;
};

/// Validate invariants (shared n, y in {0,1} with both classes, intercept
/// column, dosages in [0,2]) and assemble a Dataset. Throws jase::Error.
Dataset make_dataset(Eigen::VectorXd y, Eigen::MatrixXd s, Eigen::VectorXd g,
                     Eigen::MatrixXd x,
                     std::vector<std::string> snp_ids = {});

/// Load delimited text inputs. covariate_path may be empty, in which case
/// x is the n x 1 intercept column. Monomorphic SNP columns are kept with
/// a warning on stderr.
Dataset load_dataset(const std::string& genotype_path,
                     const std::string& expression_path,
                     const std::string& phenotype_path,
                     const std::string& covariate_path,
                     const LoadOptions& options = {});

/// Write a Dataset back to the same file formats (covariates written only
/// when q > 1). Used by the simulation driver.
void write_dataset(const Dataset& d, const std::string& genotype_path,
                   const std::string& expression_path,
                   const std::string& phenotype_path,
                   const std::string& covariate_path);

/// Dominant recode: dosage d -> min(d, 1). Idempotent.
Eigen::MatrixXd apply_dominant(const Eigen::MatrixXd& s);

/// Row i equals g[i] * s.row(i); the paper's SNP-by-expression design.
Eigen::MatrixXd interaction_matrix(const Dataset& d);

}  // namespace jase
