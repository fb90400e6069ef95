#include "jase/dataset.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "jase/error.hpp"

namespace jase {

namespace {

constexpr double kMissing = -1.0;

bool is_missing_token(const std::string& tok) {
  return tok == "NA" || tok == "na" || tok == "." || tok == "?";
}

bool looks_numeric(const std::string& tok) {
  if (tok.empty()) return false;
  char* end = nullptr;
  std::strtod(tok.c_str(), &end);
  return end != tok.c_str() && *end == '\0';
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
      if (!cur.empty()) {
        fields.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) fields.push_back(cur);
  return fields;
}

std::vector<std::vector<std::string>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::Io, "cannot open file: " + path);
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    auto fields = split_fields(line);
    if (!fields.empty()) {
      rows.push_back(std::move(fields));
    }
  }
  if (rows.empty()) {
    raise(ErrorCode::Parse, "empty file: " + path);
  }
  return rows;
}

double parse_real(const std::string& tok, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    raise(ErrorCode::Parse, "non-numeric value '" + tok + "' in " + path);
  }
  if (!std::isfinite(v)) {
    raise(ErrorCode::InvalidValue, "non-finite value in " + path);
  }
  return v;
}

}  // namespace

Dataset make_dataset(Eigen::VectorXd y, Eigen::MatrixXd s, Eigen::VectorXd g,
                     Eigen::MatrixXd x, std::vector<std::string> snp_ids) {
  const Eigen::Index n = y.size();
  if (n < 1) {
    raise(ErrorCode::Dimension, "dataset has no subjects");
  }
  if (s.rows() != n || g.size() != n || x.rows() != n) {
    std::ostringstream msg;
    msg << "row count mismatch: phenotype " << n << ", genotype " << s.rows()
        << ", expression " << g.size() << ", covariates " << x.rows();
    raise(ErrorCode::Dimension, msg.str());
  }
  if (s.cols() < 1) {
    raise(ErrorCode::Dimension, "genotype matrix has no SNP columns");
  }
  if (x.cols() < 1) {
    raise(ErrorCode::Dimension, "covariate matrix has no columns");
  }

  bool has_case = false;
  bool has_control = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] == 0.0) {
      has_control = true;
    } else if (y[i] == 1.0) {
      has_case = true;
    } else {
      raise(ErrorCode::InvalidValue, "phenotype entries must be 0 or 1");
    }
  }
  if (!has_case || !has_control) {
    raise(ErrorCode::SingleClass,
          "phenotype contains a single class; null fit would be degenerate");
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    if (x(i, 0) != 1.0) {
      raise(ErrorCode::InvalidValue,
            "covariate column 0 must be the all-ones intercept");
    }
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (!std::isfinite(x(i, j))) {
        raise(ErrorCode::InvalidValue, "NaN in covariates");
      }
    }
    if (!std::isfinite(g[i])) {
      raise(ErrorCode::InvalidValue, "NaN in expression");
    }
  }

  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = s(i, j);
      if (!(v >= 0.0 && v <= 2.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "invalid dosage " << v << " at row " << i << ", SNP " << j;
        raise(ErrorCode::InvalidValue, msg.str());
      }
    }
  }

  if (!snp_ids.empty() &&
      snp_ids.size() != static_cast<std::size_t>(s.cols())) {
    raise(ErrorCode::Dimension, "SNP id count does not match genotype columns");
  }

  Dataset d;
  d.y = std::move(y);
  d.s = std::move(s);
  d.g = std::move(g);
  d.x = std::move(x);
  d.snp_ids = std::move(snp_ids);
  return d;
}

Dataset load_dataset(const std::string& genotype_path,
                     const std::string& expression_path,
                     const std::string& phenotype_path,
                     const std::string& covariate_path,
                     const LoadOptions& options) {
  auto geno_rows = read_table(genotype_path);

  std::vector<std::string> snp_ids;
  std::size_t first_data_row = 0;
  if (!looks_numeric(geno_rows[0][0]) && !is_missing_token(geno_rows[0][0])) {
    snp_ids = geno_rows[0];
    first_data_row = 1;
    if (geno_rows.size() == 1) {
      raise(ErrorCode::Parse, "genotype file has a header but no data rows");
    }
  }

  const std::size_t n = geno_rows.size() - first_data_row;
  const std::size_t p = geno_rows[first_data_row].size();

  Eigen::MatrixXd s(n, p);
  bool any_missing = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = geno_rows[first_data_row + i];
    if (row.size() != p) {
      raise(ErrorCode::Dimension,
            "ragged genotype file: row " + std::to_string(i));
    }
    for (std::size_t j = 0; j < p; ++j) {
      if (is_missing_token(row[j])) {
        if (!options.impute_missing) {
          raise(ErrorCode::InvalidValue,
                "missing genotype at row " + std::to_string(i) +
                    " (rerun with imputation enabled to mean-impute)");
        }
        s(i, j) = kMissing;
        any_missing = true;
        continue;
      }
      const double v = parse_real(row[j], genotype_path);
      if (v != 0.0 && v != 1.0 && v != 2.0) {
        raise(ErrorCode::InvalidValue,
              "invalid dosage '" + row[j] + "' in " + genotype_path);
      }
      s(i, j) = v;
    }
  }

  if (options.coding == GenotypeCoding::Dominant) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      for (Eigen::Index i = 0; i < s.rows(); ++i) {
        if (s(i, j) > 1.0) s(i, j) = 1.0;
      }
    }
  }

  if (any_missing) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      double sum = 0.0;
      Eigen::Index cnt = 0;
      for (Eigen::Index i = 0; i < s.rows(); ++i) {
        if (s(i, j) != kMissing) {
          sum += s(i, j);
          ++cnt;
        }
      }
      if (cnt == 0) {
        raise(ErrorCode::InvalidValue,
              "SNP column " + std::to_string(j) + " is entirely missing");
      }
      const double mean = sum / static_cast<double>(cnt);
      for (Eigen::Index i = 0; i < s.rows(); ++i) {
        if (s(i, j) == kMissing) s(i, j) = mean;
      }
    }
  }

  auto expr_rows = read_table(expression_path);
  if (expr_rows.size() != n) {
    raise(ErrorCode::Dimension, "expression row count does not match genotype");
  }
  Eigen::VectorXd g(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (expr_rows[i].size() != 1) {
      raise(ErrorCode::Parse, "expression file must have one value per row");
    }
    g[i] = parse_real(expr_rows[i][0], expression_path);
  }

  auto pheno_rows = read_table(phenotype_path);
  if (pheno_rows.size() != n) {
    raise(ErrorCode::Dimension, "phenotype row count does not match genotype");
  }
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (pheno_rows[i].size() != 1) {
      raise(ErrorCode::Parse, "phenotype file must have one value per row");
    }
    y[i] = parse_real(pheno_rows[i][0], phenotype_path);
  }

  Eigen::MatrixXd x;
  if (covariate_path.empty()) {
    x = Eigen::MatrixXd::Ones(n, 1);
  } else {
    auto cov_rows = read_table(covariate_path);
    if (cov_rows.size() != n) {
      raise(ErrorCode::Dimension,
            "covariate row count does not match genotype");
    }
    const std::size_t qm1 = cov_rows[0].size();
    x.resize(n, qm1 + 1);
    x.col(0).setOnes();
    for (std::size_t i = 0; i < n; ++i) {
      if (cov_rows[i].size() != qm1) {
        raise(ErrorCode::Dimension,
              "ragged covariate file: row " + std::to_string(i));
      }
      for (std::size_t j = 0; j < qm1; ++j) {
        x(i, j + 1) = parse_real(cov_rows[i][j], covariate_path);
      }
    }
  }

  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    if ((s.col(j).array() == s(0, j)).all()) {
      std::cerr << "warning: SNP column " << j
                << " is monomorphic; it contributes no signal\n";
    }
  }

  return make_dataset(std::move(y), std::move(s), std::move(g), std::move(x),
                      std::move(snp_ids));
}

void write_dataset(const Dataset& d, const std::string& genotype_path,
                   const std::string& expression_path,
                   const std::string& phenotype_path,
                   const std::string& covariate_path) {
  auto open = [](const std::string& path) {
    std::ofstream out(path);
    if (!out) {
      raise(ErrorCode::Io, "cannot write file: " + path);
    }
    return out;
  };

  char buf[64];
  {
    auto out = open(genotype_path);
    if (!d.snp_ids.empty()) {
      for (Eigen::Index j = 0; j < d.p(); ++j) {
        out << (j ? " " : "") << d.snp_ids[j];
      }
      out << '\n';
    }
    for (Eigen::Index i = 0; i < d.n(); ++i) {
      for (Eigen::Index j = 0; j < d.p(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", d.s(i, j));
        out << (j ? " " : "") << buf;
      }
      out << '\n';
    }
  }
  {
    auto out = open(expression_path);
    for (Eigen::Index i = 0; i < d.n(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", d.g[i]);
      out << buf << '\n';
    }
  }
  {
    auto out = open(phenotype_path);
    for (Eigen::Index i = 0; i < d.n(); ++i) {
      out << static_cast<int>(d.y[i]) << '\n';
    }
  }
  if (!covariate_path.empty() && d.q() > 1) {
    auto out = open(covariate_path);
    for (Eigen::Index i = 0; i < d.n(); ++i) {
      for (Eigen::Index j = 1; j < d.q(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", d.x(i, j));
        out << (j > 1 ? " " : "") << buf;
      }
      out << '\n';
    }
  }
}

Eigen::MatrixXd apply_dominant(const Eigen::MatrixXd& s) {
  return s.cwiseMin(1.0);
}

Eigen::MatrixXd interaction_matrix(const Dataset& d) {
  return d.g.asDiagonal() * d.s;
}

}  // namespace jase
