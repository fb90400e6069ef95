#include "jase/fdr.hpp"

#include <algorithm>
#include <numeric>

#include "jase/error.hpp"

namespace jase {

std::vector<double> fdr_adjust(const std::vector<double>& pvalues) {
  const std::size_t m = pvalues.size();
  if (m == 0) {
    raise(ErrorCode::InvalidValue, "fdr_adjust: empty p-value list");
  }
  for (double p : pvalues) {
    if (!(p > 0.0 && p <= 1.0)) {
      raise(ErrorCode::InvalidValue, "fdr_adjust: p-values must lie in (0,1]");
    }
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pvalues[a] < pvalues[b];
  });

  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double scaled =
        pvalues[order[r]] * static_cast<double>(m) / static_cast<double>(r + 1);
    running = std::min(running, scaled);
    adjusted[order[r]] = running;
  }
  return adjusted;
}

}  // namespace jase
