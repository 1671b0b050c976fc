#include "qpec/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qpec/combinatorics.hpp"

namespace qpec {

namespace {

double log_q(const QpecParams& params, double x) {
    return std::log(x) / std::log(static_cast<double>(params.field->q()));
}

// x * log_q(x) with the 0 log 0 := 0 convention
double xlogq(const QpecParams& params, double x) {
    return x > 0 ? x * log_q(params, x) : 0.0;
}

}  // namespace

double transition_prob(const QpecParams& params, uint32_t x, const SymbolSet& y) {
    const int c = y.cardinality();
    if (c != 1 && c != static_cast<int>(params.M))
        throw BadOutputCardinality("output cardinality must be 1 or M");
    if (!y.contains(x)) return 0.0;
    if (c == 1) return 1.0 - params.epsilon;
    const double n_supers =
        static_cast<double>(binomial(static_cast<int>(params.field->q()) - 1,
                                     static_cast<int>(params.M) - 1));
    return params.epsilon / n_supers;
}

SymbolSet sample_output(const QpecParams& params, uint32_t x, Rng& rng) {
    const Field& f = *params.field;
    if (rng.uniform01() >= params.epsilon) return SymbolSet::singleton(f, x);
    // x plus M-1 symbols drawn without replacement from the rest
    const uint32_t q = f.q();
    std::vector<uint32_t> others;
    others.reserve(q - 1);
    for (uint32_t s = 0; s < q; ++s)
        if (s != x) others.push_back(s);
    uint64_t mask = uint64_t{1} << x;
    for (uint32_t i = 0; i < params.M - 1; ++i) {
        const uint64_t j = i + rng.below(others.size() - i);
        std::swap(others[i], others[j]);
        mask |= uint64_t{1} << others[i];
    }
    return {f, mask};
}

double capacity(const QpecParams& params) {
    return 1.0 - params.epsilon * log_q(params, static_cast<double>(params.M));
}

double conditional_entropy(const QpecParams& params) {
    const double eps = params.epsilon;
    const double n_supers =
        static_cast<double>(binomial(static_cast<int>(params.field->q()) - 1,
                                     static_cast<int>(params.M) - 1));
    double h = -xlogq(params, 1.0 - eps);
    if (eps > 0) h -= eps * log_q(params, eps / n_supers);
    return h;
}

double output_entropy(const QpecParams& params, const std::vector<double>& px) {
    const uint32_t q = params.field->q();
    if (px.size() != q) throw BadDistribution("px must have q entries");
    double sum = 0.0;
    for (double p : px) {
        if (p < 0) throw BadDistribution("negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw BadDistribution("px must sum to 1");

    const uint64_t n_sets = binomial(static_cast<int>(q), static_cast<int>(params.M));
    if (n_sets > 10'000'000)
        throw ComplexityCapExceeded("too many super-symbol sets to enumerate");
    const double eps = params.epsilon;
    const double n_supers =
        static_cast<double>(binomial(static_cast<int>(q) - 1, static_cast<int>(params.M) - 1));

    double h = 0.0;
    for (uint32_t x = 0; x < q; ++x) h -= xlogq(params, px[x] * (1.0 - eps));
    if (eps > 0) {
        // iterate all M-subsets of the alphabet (Gosper's hack)
        const uint64_t limit = (q == 64) ? ~uint64_t{0} : (uint64_t{1} << q) - 1;
        uint64_t mask = (uint64_t{1} << params.M) - 1;
        while (mask <= limit) {
            double psum = 0.0;
            uint64_t m = mask;
            while (m) {
                psum += px[static_cast<uint32_t>(__builtin_ctzll(m))];
                m &= m - 1;
            }
            h -= xlogq(params, eps / n_supers * psum);
            const uint64_t c = mask & ~(mask - 1);
            const uint64_t r = mask + c;
            const uint64_t next = r | (((mask ^ r) >> 2) / c);
            if (next > limit || next <= mask) break;
            mask = next;
        }
    }
    return h;
}

}  // namespace qpec
