#pragma once

#include <cstdint>
#include <vector>

#include "qpec/errors.hpp"
#include "qpec/gf.hpp"
#include "qpec/rng.hpp"
#include "qpec/symbol_set.hpp"

namespace qpec {

/// q-ary partial erasure channel: the output is {x} with probability
/// 1 - epsilon, or a uniformly chosen M-subset containing x.
struct QpecParams {
    QpecParams(const Field& f, uint32_t M_, double epsilon_)
        : field(&f), M(M_), epsilon(epsilon_) {
        if (M < 2 || M > f.q())
            throw std::invalid_argument("require 2 <= M <= q");
        if (!(epsilon >= 0.0 && epsilon <= 1.0))
            throw std::invalid_argument("require 0 <= epsilon <= 1");
    }

    const Field* field;
    uint32_t M;
    double epsilon;
};

/// Pr(Y = y | X = x). y must have cardinality 1 or M.
double transition_prob(const QpecParams& params, uint32_t x, const SymbolSet& y);

SymbolSet sample_output(const QpecParams& params, uint32_t x, Rng& rng);

/// Channel capacity 1 - epsilon * log_q(M), in q-ary symbols per use.
double capacity(const QpecParams& params);

/// H(Y|X) in q-ary units; independent of the input distribution.
double conditional_entropy(const QpecParams& params);

/// H(Y) in q-ary units for an input distribution px over the alphabet.
/// Sums over the q singleton outputs and all C(q, M) super-symbol sets.
double output_entropy(const QpecParams& params, const std::vector<double>& px);

/// C(n, k) as uint64 for n <= 64.
uint64_t binomial(int n, int k);

}  // namespace qpec
