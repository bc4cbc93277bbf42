// Exact sign test on paired metric differences.

#pragma once

#include <vector>

namespace srld::bench {

// P[Binomial(n, 1/2) >= wins], exact.  n = wins + losses; ties are dropped
// by the caller.  Returns 1 when n == 0.
double binomial_tail_p(int wins, int n);

// One-sided sign test that method A improves on method B.  `diffs` holds
// metric(A) - metric(B) per seed; improvement means a negative difference
// when lower_is_better, positive otherwise.  Zero differences are ties.
double sign_test_p(const std::vector<double>& diffs, bool lower_is_better);

}  // namespace srld::bench
