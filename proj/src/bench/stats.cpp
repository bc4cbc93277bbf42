#include "srld/bench/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace srld::bench {

double binomial_tail_p(int wins, int n) {
  if (n < 0 || wins < 0 || wins > n)
    throw std::invalid_argument("binomial_tail_p: need 0 <= wins <= n");
  if (wins == 0) return 1.0;
  // sum C(n, k) / 2^n for k = wins..n, coefficients built iteratively
  double coeff = 1.0;  // C(n, 0)
  double tail = 0.0;
  for (int k = 1; k <= n; ++k) {
    coeff *= static_cast<double>(n - k + 1) / static_cast<double>(k);
    if (k >= wins) tail += coeff;
  }
  return tail * std::pow(0.5, n);
}

double sign_test_p(const std::vector<double>& diffs, bool lower_is_better) {
  int wins = 0;
  int n = 0;
  for (double d : diffs) {
    if (d == 0.0) continue;  // tie
    ++n;
    const bool improved = lower_is_better ? d < 0.0 : d > 0.0;
    if (improved) ++wins;
  }
  return binomial_tail_p(wins, n);
}

}  // namespace srld::bench
