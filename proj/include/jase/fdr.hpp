#pragma once

#include <vector>

namespace jase {

/// Benjamini-Hochberg step-up adjusted p-values: monotone, <= 1, same
/// order as the input. Throws on empty input or p outside (0,1].
std::vector<double> fdr_adjust(const std::vector<double>& pvalues);

}  // namespace jase
