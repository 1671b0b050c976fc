#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace qpec {

/// C(n, k) for 0 <= n <= 64 (fits in uint64).
uint64_t binomial(int n, int k);

/// log C(n, k) via lgamma, for large n.
double log_binomial(double n, double k);

/// Multinomial coefficient of a multiset given as value counts,
/// i.e. (sum counts)! / prod(counts!), as a double.
double multinomial_weight(const std::vector<int>& multiset);

/// Visit every non-decreasing tuple of `size` values in [lo, hi].
void for_each_multiset(int lo, int hi, int size,
                       const std::function<void(const std::vector<int>&)>& fn);

}  // namespace qpec
