// Test-only oracles, independent of the implementation paths they check.
#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "qpec/cardinality_de.hpp"

namespace qpec::oracles {

/// Exhaustive count of set tuples over a u-element universe with prescribed
/// cardinalities, bucketed by the exact intersection cardinality. Dynamic
/// program over elements; each element independently joins any subset of the
/// d sets (capacity-bounded), and the intersection grows when it joins all.
/// Counts fit in uint64 for u <= 7, d <= 5.
inline std::vector<uint64_t> intersection_counts(const std::vector<int>& cards, int u) {
    const int d = static_cast<int>(cards.size());
    std::vector<int> radix(d + 1);
    for (int k = 0; k < d; ++k) radix[k] = cards[k] + 1;
    radix[d] = u + 1;  // intersection counter
    size_t states = 1;
    for (int r : radix) states *= static_cast<size_t>(r);
    std::vector<uint64_t> cur(states, 0), next(states, 0);

    std::vector<size_t> stride(d + 1);
    stride[0] = 1;
    for (int k = 1; k <= d; ++k) stride[k] = stride[k - 1] * radix[k - 1];

    // per full-capacity pattern: the valid membership picks and their offsets
    const uint32_t n_picks = 1u << d;
    std::vector<std::vector<size_t>> offsets(n_picks);
    for (uint32_t fullmask = 0; fullmask < n_picks; ++fullmask)
        for (uint32_t pick = 0; pick < n_picks; ++pick) {
            if (pick & fullmask) continue;  // would exceed a capacity
            size_t off = 0;
            for (int k = 0; k < d; ++k)
                if ((pick >> k) & 1) off += stride[k];
            if (pick + 1 == n_picks) off += stride[d];
            offsets[fullmask].push_back(off);
        }

    cur[0] = 1;
    std::vector<int> digits(d, 0);
    for (int elem = 0; elem < u; ++elem) {
        std::fill(next.begin(), next.end(), 0);
        std::fill(digits.begin(), digits.end(), 0);
        uint32_t fullmask = 0;
        for (int k = 0; k < d; ++k)
            if (cards[k] == 0) fullmask |= 1u << k;
        for (size_t s = 0; s < states; ++s) {
            if (cur[s] != 0)
                for (size_t off : offsets[fullmask]) next[s + off] += cur[s];
            // odometer over the per-set counters (the intersection digit is
            // the most significant and never wraps within a block)
            for (int k = 0; k <= d; ++k) {
                if (k == d) break;
                if (++digits[k] < radix[k]) {
                    if (digits[k] == cards[k]) fullmask |= 1u << k;
                    break;
                }
                digits[k] = 0;
                if (cards[k] > 0) fullmask &= ~(1u << k);
            }
        }
        std::swap(cur, next);
    }

    std::vector<uint64_t> by_intersection(u + 1, 0);
    size_t base = 0;
    for (int k = 0; k < d; ++k) base += static_cast<size_t>(cards[k]) * stride[k];
    for (int j = 0; j <= u; ++j) by_intersection[j] = cur[base + j * stride[d]];
    return by_intersection;
}

/// Brute-force Q_m: incoming CTV sets of the given cardinalities plus a
/// channel set of cardinality M, all containing the reference symbol, as
/// exact rationals over cardinality m in [0, q].
inline std::vector<BigRational> q_m_bruteforce(const std::vector<int>& cards, int M, int q) {
    std::vector<int> shifted;
    for (int c : cards) shifted.push_back(c - 1);
    shifted.push_back(M - 1);
    const auto counts = intersection_counts(shifted, q - 1);
    BigInt total = 0;
    for (uint64_t c : counts) total += c;
    std::vector<BigRational> out(q + 1, 0);
    for (int j = 0; j <= q - 1; ++j)
        out[j + 1] = BigRational(BigInt(counts[j]), total);  // +1: the reference symbol
    return out;
}

}  // namespace qpec::oracles
