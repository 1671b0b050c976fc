#include "qpec/combinatorics.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace qpec {

namespace {
struct BinomTable {
    std::array<std::array<uint64_t, 65>, 65> c{};
    BinomTable() {
        for (int n = 0; n <= 64; ++n) {
            c[n][0] = 1;
            for (int k = 1; k <= n; ++k)
                c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0);
        }
    }
};
const BinomTable kBinom;
}  // namespace

uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    return kBinom.c[n][k];
}

double log_binomial(double n, double k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

double multinomial_weight(const std::vector<int>& multiset) {
    double log_w = std::lgamma(static_cast<double>(multiset.size()) + 1);
    size_t i = 0;
    while (i < multiset.size()) {
        size_t j = i;
        while (j < multiset.size() && multiset[j] == multiset[i]) ++j;
        log_w -= std::lgamma(static_cast<double>(j - i) + 1);
        i = j;
    }
    return std::round(std::exp(log_w));
}

void for_each_multiset(int lo, int hi, int size,
                       const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> cur(size, lo);
    if (size == 0) {
        fn(cur);
        return;
    }
    while (true) {
        fn(cur);
        int i = size - 1;
        while (i >= 0 && cur[i] == hi) --i;
        if (i < 0) return;
        int v = cur[i] + 1;
        for (int j = i; j < size; ++j) cur[j] = v;
    }
}

}  // namespace qpec
