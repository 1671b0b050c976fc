#include "qpec/cardinality_de.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qpec/combinatorics.hpp"
#include "qpec/symbol_set.hpp"

namespace qpec {

namespace {

BigInt big_binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;  // exact at every step
    }
    return r;
}

void normalize(CardinalityPmf& v) {
    double s = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= s;
}

}  // namespace

int smallest_prime_factor(int n) {
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return d;
    return n;
}

BigInt k_intersections(const std::vector<int>& cards, int q, int m) {
    const int mu = *std::min_element(cards.begin(), cards.end());
    BigInt total = 0;
    for (int s = 0; s <= mu - m; ++s) {
        BigInt ups = big_binomial(q, m + s);
        for (int mp : cards) ups *= big_binomial(q - (m + s), mp - (m + s));
        BigInt term = ups * big_binomial(m + s, m);
        total += (s % 2 == 0) ? term : -term;
    }
    return total;
}

std::vector<BigRational> q_m_exact(const std::vector<int>& cards, int M, int q) {
    std::vector<int> all = cards;
    all.push_back(M);
    const int mu = *std::min_element(all.begin(), all.end());
    std::vector<BigRational> out(q + 1, 0);
    if (mu == 1) {
        out[1] = 1;
        return out;
    }
    BigInt denom = 1;
    std::vector<int> shifted;
    shifted.reserve(all.size());
    for (int mp : all) {
        denom *= big_binomial(q - 1, mp - 1);
        shifted.push_back(mp - 1);
    }
    for (int m = 1; m <= mu; ++m)
        out[m] = BigRational(k_intersections(shifted, q - 1, m - 1), denom);
    return out;
}

CardinalityPmf q_m(const std::vector<int>& cards, int M, int q) {
    const auto exact = q_m_exact(cards, M, q);
    CardinalityPmf out(q + 1, 0.0);
    for (int m = 0; m <= q; ++m) out[m] = exact[m].convert_to<double>();
    return out;
}

SumsetBounds sumset_bounds(const std::vector<int>& cards, int q, int smallest_prime) {
    SumsetBounds b{};
    const int kappa = *std::max_element(cards.begin(), cards.end());
    int sum = std::accumulate(cards.begin(), cards.end(), 0);
    double n_sums = 1.0;
    for (int c : cards) n_sums *= c;
    b.lower = std::max(kappa, std::min(smallest_prime,
                                       sum - static_cast<int>(cards.size()) + 1));
    b.upper = static_cast<int>(std::min(static_cast<double>(q), n_sums));
    b.q_condition = false;
    if (cards.size() >= 2) {
        int top = 0, second = 0;
        for (int c : cards) {
            if (c >= top) {
                second = top;
                top = c;
            } else if (c > second) {
                second = c;
            }
        }
        b.q_condition = top + second > q;
    }
    return b;
}

const char* to_string(PmModel model) {
    switch (model) {
        case PmModel::Exact: return "exact";
        case PmModel::LowerBound: return "min";
        case PmModel::UpperBound: return "max";
        case PmModel::Balls: return "balls";
        case PmModel::Union: return "union";
    }
    return "?";
}

std::optional<PmModel> parse_pm_model(const std::string& name) {
    if (name == "exact") return PmModel::Exact;
    if (name == "min") return PmModel::LowerBound;
    if (name == "max") return PmModel::UpperBound;
    if (name == "balls") return PmModel::Balls;
    if (name == "union") return PmModel::Union;
    return std::nullopt;
}

std::vector<std::vector<double>> gamma_balls(int q) {
    std::vector<std::vector<double>> g(q + 1, std::vector<double>(q + 1, 0.0));
    for (int m = 0; m <= q; ++m) {
        g[m][m] = static_cast<double>(m) / q;
        if (m < q) g[m][m + 1] = static_cast<double>(q - m) / q;
    }
    return g;
}

std::vector<std::vector<double>> gamma_union(int q, int kappa) {
    // union of an occupied m-set with a uniform kappa-set: hypergeometric
    // overlap j = m + kappa - m'
    std::vector<std::vector<double>> g(q + 1, std::vector<double>(q + 1, 0.0));
    const double denom = static_cast<double>(binomial(q, kappa));
    for (int m = 0; m <= q; ++m)
        for (int mp = 0; mp <= q; ++mp) {
            const int j = m + kappa - mp;
            if (j < 0 || j > std::min(m, kappa)) continue;
            g[m][mp] = static_cast<double>(binomial(m, j)) *
                       static_cast<double>(binomial(q - m, kappa - j)) / denom;
        }
    return g;
}

namespace {

// first row of chain^steps (start state 0), by repeated vector-matrix products
std::vector<double> chain_front(const std::vector<std::vector<double>>& chain, uint64_t steps) {
    const size_t n = chain.size();
    std::vector<double> v(n, 0.0), next(n);
    v[0] = 1.0;
    for (uint64_t s = 0; s < steps; ++s) {
        std::fill(next.begin(), next.end(), 0.0);
        bool absorbed = v[n - 1] > 1.0 - 1e-15;
        if (absorbed) break;
        for (size_t i = 0; i < n; ++i) {
            if (v[i] == 0.0) continue;
            for (size_t j = 0; j < n; ++j)
                if (chain[i][j] != 0.0) next[j] += v[i] * chain[i][j];
        }
        std::swap(v, next);
    }
    return v;
}

CardinalityPmf truncate_renormalize(std::vector<double> state, int q, int lower) {
    CardinalityPmf out(q + 1, 0.0);
    for (int m = lower; m <= q; ++m) out[m] = state[m];
    normalize(out);
    return out;
}

}  // namespace

CardinalityPmf p_m(PmModel model, const std::vector<int>& cards, const Field& field) {
    const int q = static_cast<int>(field.q());
    const auto b = sumset_bounds(cards, q, static_cast<int>(field.p()));
    CardinalityPmf out(q + 1, 0.0);
    if (b.q_condition) {
        out[q] = 1.0;
        return out;
    }
    if (b.lower == b.upper) {  // pinched support forces the cardinality
        out[b.lower] = 1.0;
        return out;
    }
    switch (model) {
        case PmModel::UpperBound:
            out[b.upper] = 1.0;
            return out;
        case PmModel::LowerBound:
            out[b.lower] = 1.0;
            return out;
        case PmModel::Balls: {
            long double n_sums = 1;
            for (int c : cards) n_sums *= c;
            // chain_front stops once absorbed, so clamping huge step counts is safe
            const uint64_t steps =
                n_sums > 1e18L ? ~uint64_t{0} : static_cast<uint64_t>(n_sums);
            return truncate_renormalize(chain_front(gamma_balls(q), steps), q, b.lower);
        }
        case PmModel::Union: {
            const int kappa = *std::max_element(cards.begin(), cards.end());
            long double n_groups = 1;
            for (int c : cards) n_groups *= c;
            n_groups /= kappa;
            const uint64_t steps =
                n_groups > 1e18L ? ~uint64_t{0} : static_cast<uint64_t>(n_groups);
            return truncate_renormalize(chain_front(gamma_union(q, kappa), steps), q, b.lower);
        }
        case PmModel::Exact: {
            double n_sums = 1.0, n_tuples = 1.0;
            for (int c : cards) {
                n_sums *= c;
                n_tuples *= static_cast<double>(binomial(q, c));
            }
            if (q > 5 || n_sums > 1e6 || n_tuples > 2e7)
                throw ComplexityCapExceeded("exact P_m enumeration cap exceeded");
            // Uniform random sets scaled by nonzero labels stay uniform, so
            // the label randomness integrates out; enumerate set tuples only.
            std::vector<std::vector<uint64_t>> sets_by_card(q + 1);
            const uint64_t full = (uint64_t{1} << q) - 1;
            for (uint64_t mask = 1; mask <= full; ++mask)
                sets_by_card[__builtin_popcountll(mask)].push_back(mask);
            std::vector<double> counts(q + 1, 0.0);
            // depth-first over tuples with an incremental sumset
            struct Frame {
                size_t next = 0;
            };
            std::vector<uint64_t> acc(cards.size() + 1);
            acc[0] = 1;  // {0}
            std::vector<Frame> stack(cards.size() + 1);
            size_t depth = 0;
            while (true) {
                if (depth == cards.size()) {
                    counts[__builtin_popcountll(acc[depth])] += 1.0;
                    --depth;
                    continue;
                }
                auto& frame = stack[depth];
                const auto& pool = sets_by_card[cards[depth]];
                if (frame.next == pool.size()) {
                    frame.next = 0;
                    if (depth == 0) break;
                    --depth;
                    continue;
                }
                acc[depth + 1] = sumset_mask(field, acc[depth], pool[frame.next]);
                ++frame.next;
                ++depth;
            }
            for (int m = 0; m <= q; ++m) out[m] = counts[m];
            normalize(out);
            return out;
        }
    }
    throw std::logic_error("unknown P_m model");
}

double expected_absorption(int q, int kappa) {
    if (kappa < 1 || kappa > q) throw std::invalid_argument("require 1 <= kappa <= q");
    const auto g = gamma_union(q, kappa);
    // solve (I - Q) x = 1 on the transient states 0..q-1
    std::vector<std::vector<double>> a(q, std::vector<double>(q + 1, 0.0));
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - g[i][j];
        a[i][q] = 1.0;
    }
    for (int col = 0; col < q; ++col) {
        int piv = col;
        for (int r = col + 1; r < q; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-14) throw SingularMatrix("absorbing chain is defective");
        std::swap(a[col], a[piv]);
        for (int r = 0; r < q; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int j = col; j <= q; ++j) a[r][j] -= f * a[col][j];
        }
    }
    return kappa * a[0][q] / a[0][0];
}

CardinalityDe::CardinalityDe(const DegreeDistribution& dd, uint32_t q, uint32_t M, PmModel model)
    : dd_(dd), q_(q), M_(M), model_(model) {
    if (M < 2 || M > q) throw std::invalid_argument("require 2 <= M <= q");
    field_.emplace(Field::make(q));  // also validates q as a prime power

    // check-side multiset terms, incoming VTC cardinalities in [1, M]
    double total_terms = 0;
    for (const auto& [i, coeff] : dd_.rho())
        total_terms += std::exp(log_binomial(M + i - 2, i - 1));
    if (total_terms > 5e6) throw ComplexityCapExceeded("check-side multiset enumeration too large");
    for (const auto& [i, coeff] : dd_.rho()) {
        (void)coeff;
        std::vector<CheckTerm> terms;
        for_each_multiset(1, static_cast<int>(M), i - 1, [&](const std::vector<int>& cards) {
            CheckTerm t;
            t.cards = cards;
            t.weight = multinomial_weight(cards);
            terms.push_back(std::move(t));
        });
        check_terms_[i] = std::move(terms);
    }

    // intersection-cardinality chain per incoming CTV cardinality m:
    // state j -> j' with prob C(j-1, j'-1) C(q-j, m-j') / C(q-1, m-1)
    hyp_.assign(q + 1, {});
    for (uint32_t m = 1; m <= q; ++m) {
        auto& h = hyp_[m];
        h.assign(q + 1, std::vector<double>(q + 1, 0.0));
        for (uint32_t j = 1; j <= q; ++j) {
            const double denom = static_cast<double>(binomial(q - 1, m - 1));
            for (uint32_t jp = 1; jp <= std::min(j, m); ++jp) {
                const double ways = static_cast<double>(binomial(j - 1, jp - 1)) *
                                    static_cast<double>(binomial(q - j, m - jp));
                if (ways > 0) h[j][jp] = ways / denom;
            }
        }
    }
}

CardinalityPmf CardinalityDe::check_update(const CardinalityPmf& z) const {
    CardinalityPmf w(q_ + 1, 0.0);
    for (const auto& [i, coeff] : dd_.rho()) {
        for (const auto& term : check_terms_.at(i)) {
            double pr = term.weight;
            for (int c : term.cards) {
                pr *= z[c];
                if (pr == 0.0) break;
            }
            if (pr == 0.0) continue;
            if (term.pm.empty()) term.pm = p_m(model_, term.cards, *field_);
            const double w_term = coeff * pr;
            for (uint32_t m = 1; m <= q_; ++m) w[m] += w_term * term.pm[m];
        }
    }
    normalize(w);
    return w;
}

CardinalityPmf CardinalityDe::variable_update_single_degree(const CardinalityPmf& w, int degree,
                                                            double eps) const {
    // mixture transition of the intersection chain under w
    std::vector<std::vector<double>> t(q_ + 1, std::vector<double>(q_ + 1, 0.0));
    for (uint32_t m = 1; m <= q_; ++m) {
        if (w[m] == 0.0) continue;
        for (uint32_t j = 1; j <= q_; ++j)
            for (uint32_t jp = 1; jp <= std::min(j, m); ++jp) t[j][jp] += w[m] * hyp_[m][j][jp];
    }
    std::vector<double> v(q_ + 1, 0.0), next(q_ + 1);
    v[M_] = 1.0;  // channel-information cardinality under a partial erasure
    for (int step = 0; step < degree - 1; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (uint32_t j = 1; j <= q_; ++j) {
            if (v[j] == 0.0) continue;
            for (uint32_t jp = 1; jp <= j; ++jp) next[jp] += v[j] * t[j][jp];
        }
        std::swap(v, next);
    }
    CardinalityPmf z(q_ + 1, 0.0);
    for (uint32_t m = 1; m <= q_; ++m) z[m] = eps * v[m];
    z[1] += 1.0 - eps;
    normalize(z);
    return z;
}

CardinalityPmf CardinalityDe::variable_update(const CardinalityPmf& w, double eps) const {
    std::vector<std::vector<double>> t(q_ + 1, std::vector<double>(q_ + 1, 0.0));
    for (uint32_t m = 1; m <= q_; ++m) {
        if (w[m] == 0.0) continue;
        for (uint32_t j = 1; j <= q_; ++j)
            for (uint32_t jp = 1; jp <= std::min(j, m); ++jp) t[j][jp] += w[m] * hyp_[m][j][jp];
    }
    std::vector<double> v(q_ + 1, 0.0), next(q_ + 1);
    v[M_] = 1.0;
    CardinalityPmf z(q_ + 1, 0.0);
    int composed = 0;
    for (const auto& [i, coeff] : dd_.lambda()) {
        while (composed < i - 1) {
            std::fill(next.begin(), next.end(), 0.0);
            for (uint32_t j = 1; j <= q_; ++j) {
                if (v[j] == 0.0) continue;
                for (uint32_t jp = 1; jp <= j; ++jp) next[jp] += v[j] * t[j][jp];
            }
            std::swap(v, next);
            ++composed;
        }
        for (uint32_t m = 1; m <= q_; ++m) z[m] += coeff * v[m];
    }
    for (uint32_t m = 1; m <= q_; ++m) z[m] *= eps;
    z[1] += 1.0 - eps;
    normalize(z);
    return z;
}

DeTrace CardinalityDe::run(double eps, const DeOptions& opts) const {
    DeTrace trace;
    CardinalityPmf z(q_ + 1, 0.0);
    z[1] = 1.0 - eps;
    z[M_] += eps;
    trace.pe.push_back(1.0 - z[1]);
    if (opts.record_distributions) trace.z.push_back(z);
    int stagnant = 0;
    double last_pe = trace.pe[0];
    for (int l = 1; l <= opts.max_iters; ++l) {
        const CardinalityPmf w = check_update(z);
        z = variable_update(w, eps);
        const double pe = 1.0 - z[1];
        trace.pe.push_back(pe);
        if (opts.record_distributions) {
            trace.w.push_back(w);
            trace.z.push_back(z);
        }
        trace.iterations = l;
        if (pe < opts.pe_target) {
            trace.converged = true;
            return trace;
        }
        if (std::abs(pe - last_pe) < opts.stagnation_eps) {
            if (++stagnant >= opts.stagnation_window) {
                trace.stagnated = true;
                return trace;
            }
        } else {
            stagnant = 0;
        }
        last_pe = pe;
    }
    return trace;
}

ThresholdResult decoding_threshold(const DegreeDistribution& dd, uint32_t q, uint32_t M,
                                   PmModel model, double tol, const DeOptions& opts) {
    if (tol < 1e-5) throw std::invalid_argument("threshold tolerance must be >= 1e-5");
    const CardinalityDe de(dd, q, M, model);
    auto converges = [&](double eps) { return de.run(eps, opts).converged; };
    double lo = 0.0, hi = 1.0;
    if (converges(1.0)) return {1.0, 1.0};
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (converges(mid) ? lo : hi) = mid;
    }
    return {lo, hi};
}

}  // namespace qpec
