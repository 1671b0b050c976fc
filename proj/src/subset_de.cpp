#include "qpec/subset_de.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qpec/combinatorics.hpp"

namespace qpec {

namespace {

constexpr uint32_t kChiEtaMaxQ = 5;
constexpr size_t kChiEtaMaxIncoming = 5;

void normalize(std::vector<double>& v) {
    const double s = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= s;
}

std::vector<uint64_t> masks_from_indices(const Field& field,
                                         const std::vector<uint64_t>& indices) {
    std::vector<uint64_t> masks;
    masks.reserve(indices.size());
    for (uint64_t t : indices) masks.push_back(set_of(field, t).mask());
    return masks;
}

}  // namespace

SubsetPmf chi_distribution(const Field& field, const std::vector<uint64_t>& incoming_indices) {
    const uint32_t q = field.q();
    if (q > kChiEtaMaxQ || incoming_indices.size() > kChiEtaMaxIncoming)
        throw ComplexityCapExceeded("chi enumeration cap: q <= 5 and at most 5 incoming sets");
    const auto incoming = masks_from_indices(field, incoming_indices);
    const size_t d = incoming.size();
    SubsetPmf out(uint64_t{1} << q, 0.0);
    // all (q-1)^(d+1) tuples of incoming labels plus the outgoing label
    std::vector<uint32_t> labels(d + 1, 1);
    const double weight = 1.0 / std::pow(static_cast<double>(q - 1), static_cast<double>(d + 1));
    while (true) {
        uint64_t acc = 1;  // {0}
        for (size_t j = 0; j < d; ++j)
            acc = sumset_mask(field, acc,
                              scale_mask(field, incoming[j], field.neg(labels[j])));
        acc = scale_mask(field, acc, field.inv(labels[d]));
        out[index_of(SymbolSet(field, acc))] += weight;
        size_t pos = 0;
        while (pos <= d) {
            labels[pos] = labels[pos] % (q - 1) + 1;
            if (labels[pos] != 1) break;
            ++pos;
        }
        if (pos > d) break;
    }
    return out;
}

SubsetPmf eta_distribution(const Field& field, uint32_t M,
                           const std::vector<uint64_t>& incoming_indices) {
    const uint32_t q = field.q();
    if (q > kChiEtaMaxQ || incoming_indices.size() > kChiEtaMaxIncoming)
        throw ComplexityCapExceeded("eta enumeration cap: q <= 5 and at most 5 incoming sets");
    if (M < 2 || M > q) throw std::invalid_argument("require 2 <= M <= q");
    const auto incoming = masks_from_indices(field, incoming_indices);
    uint64_t base = ~uint64_t{0};
    for (uint64_t m : incoming) {
        if (!(m & 1))
            throw std::invalid_argument("eta: incoming sets must contain the reference symbol 0");
        base &= m;
    }
    SubsetPmf out(uint64_t{1} << q, 0.0);
    // channel sets: all M-subsets containing 0, as (M-1)-subsets of the rest
    const uint64_t universe = (uint64_t{1} << (q - 1)) - 1;
    const double n_channel = static_cast<double>(binomial(q - 1, M - 1));
    uint64_t rest = (uint64_t{1} << (M - 1)) - 1;
    while (true) {
        const uint64_t chan = 1 | (rest << 1);
        out[index_of(SymbolSet(field, chan & base))] += 1.0 / n_channel;
        const uint64_t c = rest & ~(rest - 1);
        const uint64_t r = rest + c;
        const uint64_t next = r | (((rest ^ r) >> 2) / c);
        if (next > universe || next <= rest) break;
        rest = next;
    }
    return out;
}

SubsetDe::SubsetDe(const DegreeDistribution& dd, const Field& field, uint32_t M)
    : SubsetDe(dd, field, M, true) {}

SubsetDe SubsetDe::unchecked(const DegreeDistribution& dd, const Field& field, uint32_t M) {
    return SubsetDe(dd, field, M, false);
}

SubsetDe::SubsetDe(const DegreeDistribution& dd, const Field& field, uint32_t M, bool check_caps)
    : dd_(dd), field_(&field), M_(M) {
    const uint32_t q = field.q();
    if (check_caps && (q > 5 || dd.max_check_degree() > 6))
        throw ComplexityCapExceeded("exact DE guard: q <= 5 and d_c <= 6");
    if (q > 8) throw ComplexityCapExceeded("exact DE engine supports q <= 8");
    if (M < 2 || M > q) throw std::invalid_argument("require 2 <= M <= q");
    dim_ = size_t{1} << (q - 1);
    sum_table_.resize(dim_ * dim_);
    for (size_t i = 0; i < dim_; ++i) {
        const uint64_t a = (uint64_t{i} << 1) | 1;
        for (size_t j = i; j < dim_; ++j) {
            const uint64_t b = (uint64_t{j} << 1) | 1;
            const uint32_t s = static_cast<uint32_t>(sumset_mask(field, a, b) >> 1);
            sum_table_[i * dim_ + j] = s;
            sum_table_[j * dim_ + i] = s;
        }
    }
    scale_table_.resize((q - 1) * dim_);
    for (uint32_t h = 1; h < q; ++h)
        for (size_t i = 0; i < dim_; ++i) {
            const uint64_t a = (uint64_t{i} << 1) | 1;
            scale_table_[(h - 1) * dim_ + i] =
                static_cast<uint32_t>(scale_mask(field, a, h) >> 1);
        }
    card_.resize(dim_);
    for (size_t i = 0; i < dim_; ++i)
        card_[i] = __builtin_popcountll((uint64_t{i} << 1) | 1);
}

std::vector<double> SubsetDe::push_scale_uniform(const std::vector<double>& u) const {
    const uint32_t q = field_->q();
    std::vector<double> out(dim_, 0.0);
    const double w = 1.0 / (q - 1);
    for (uint32_t h = 1; h < q; ++h) {
        const uint32_t* map = &scale_table_[(h - 1) * dim_];
        for (size_t i = 0; i < dim_; ++i)
            if (u[i] != 0.0) out[map[i]] += w * u[i];
    }
    return out;
}

std::vector<double> SubsetDe::sum_conv(const std::vector<double>& a,
                                       const std::vector<double>& b) const {
    std::vector<double> out(dim_, 0.0);
    for (size_t i = 0; i < dim_; ++i) {
        if (a[i] == 0.0) continue;
        const uint32_t* row = &sum_table_[i * dim_];
        for (size_t j = 0; j < dim_; ++j)
            if (b[j] != 0.0) out[row[j]] += a[i] * b[j];
    }
    return out;
}

std::vector<double> SubsetDe::and_conv(const std::vector<double>& a,
                                       const std::vector<double>& b) const {
    std::vector<double> out(dim_, 0.0);
    for (size_t i = 0; i < dim_; ++i) {
        if (a[i] == 0.0) continue;
        for (size_t j = 0; j < dim_; ++j)
            if (b[j] != 0.0) out[i & j] += a[i] * b[j];
    }
    return out;
}

SubsetPmf SubsetDe::dress(const std::vector<double>& centered) const {
    const Field& f = *field_;
    const uint32_t q = f.q();
    SubsetPmf out(uint64_t{1} << q, 0.0);
    for (size_t i = 0; i < dim_; ++i) {
        if (centered[i] == 0.0) continue;
        const uint64_t mask = (uint64_t{i} << 1) | 1;
        // uniform translation over the alphabet: a set centered on the
        // reference symbol becomes one centered on x
        for (uint32_t x = 0; x < q; ++x) {
            uint64_t translated = 0;
            uint64_t inner = mask;
            while (inner) {
                const uint32_t y = static_cast<uint32_t>(__builtin_ctzll(inner));
                inner &= inner - 1;
                translated |= uint64_t{1} << f.add(y, x);
            }
            out[index_of(SymbolSet(f, translated))] += centered[i] / q;
        }
    }
    return out;
}

SubsetDeTrace SubsetDe::run(double eps, const DeOptions& opts) const {
    std::vector<double> chan(dim_, 0.0);
    chan[0] += 1.0 - eps;  // {0}
    {
        uint32_t count = 0;
        for (size_t i = 0; i < dim_; ++i)
            if (card_[i] == static_cast<int>(M_)) ++count;
        for (size_t i = 0; i < dim_; ++i)
            if (card_[i] == static_cast<int>(M_)) chan[i] += eps / count;
    }
    std::vector<double> z = chan;

    SubsetDeTrace trace;
    auto pe_of = [&](const std::vector<double>& v) {
        double pe = 0.0;
        for (size_t i = 0; i < dim_; ++i)
            if (card_[i] > 1) pe += v[i];
        return pe;
    };
    trace.pe.push_back(pe_of(z));
    if (opts.record_distributions) trace.z.push_back(dress(z));

    const int max_dc = dd_.max_check_degree();
    const int max_dv = dd_.max_var_degree();
    int stagnant = 0;
    double last_pe = trace.pe[0];
    for (int l = 1; l <= opts.max_iters; ++l) {
        // check side: each incoming set scaled by its own uniform label, then
        // Minkowski-summed; the outgoing division is one more uniform scaling
        const std::vector<double> tau = push_scale_uniform(z);
        std::vector<double> w_raw(dim_, 0.0);
        std::vector<double> power = tau;
        for (int k = 1; k <= max_dc - 1; ++k) {
            if (k > 1) power = sum_conv(power, tau);
            const auto it = dd_.rho().find(k + 1);
            if (it != dd_.rho().end())
                for (size_t i = 0; i < dim_; ++i) w_raw[i] += it->second * power[i];
        }
        std::vector<double> w = push_scale_uniform(w_raw);
        normalize(w);

        // variable side: intersection with the channel distribution; the
        // non-erased singleton {0} inside chan absorbs under intersection,
        // which reproduces the eps / (1 - eps) split of the update rule
        std::vector<double> z_next(dim_, 0.0);
        std::vector<double> ipower = w;
        for (int k = 1; k <= max_dv - 1; ++k) {
            if (k > 1) ipower = and_conv(ipower, w);
            const auto it = dd_.lambda().find(k + 1);
            if (it != dd_.lambda().end()) {
                const auto mixed = and_conv(chan, ipower);
                for (size_t i = 0; i < dim_; ++i) z_next[i] += it->second * mixed[i];
            }
        }
        normalize(z_next);
        z = std::move(z_next);

        const double pe = pe_of(z);
        trace.pe.push_back(pe);
        if (opts.record_distributions) {
            trace.w.push_back(dress(w));
            trace.z.push_back(dress(z));
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

CardinalityPmf SubsetDe::cardinality_marginal(const SubsetPmf& dist) const {
    const uint32_t q = field_->q();
    CardinalityPmf out(q + 1, 0.0);
    for (uint64_t t = 1; t < dist.size(); ++t) {
        if (dist[t] == 0.0) continue;
        out[set_of(*field_, t).cardinality()] += dist[t];
    }
    return out;
}

ThresholdResult subset_decoding_threshold(const DegreeDistribution& dd, const Field& field,
                                          uint32_t M, double tol, const DeOptions& opts,
                                          bool unchecked_caps) {
    if (tol < 1e-5) throw std::invalid_argument("threshold tolerance must be >= 1e-5");
    const SubsetDe de = unchecked_caps ? SubsetDe::unchecked(dd, field, M)
                                       : SubsetDe(dd, field, M);
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
