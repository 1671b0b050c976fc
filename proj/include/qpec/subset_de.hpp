#pragma once

#include <cstdint>
#include <vector>

#include "qpec/cardinality_de.hpp"
#include "qpec/degree_dist.hpp"
#include "qpec/errors.hpp"
#include "qpec/gf.hpp"
#include "qpec/symbol_set.hpp"

namespace qpec {

/// Probability vector over non-empty subsets, indexed by the canonical
/// subset index t in [1, 2^q - 1]; entry 0 unused.
using SubsetPmf = std::vector<double>;

/// Distribution of the check-node output set for fixed incoming sets,
/// enumerating every tuple of i.i.d. uniform nonzero edge labels (incoming
/// labels and the outgoing one). Caps: q <= 5, at most 5 incoming sets.
SubsetPmf chi_distribution(const Field& field, const std::vector<uint64_t>& incoming_indices);

/// Distribution of the variable-node output set for fixed incoming CTV sets,
/// averaged over the channel-information M-sets containing the reference
/// symbol 0 (the non-erasure singleton branch is handled by the DE step, not
/// here). Incoming sets must contain the reference symbol. Same caps.
SubsetPmf eta_distribution(const Field& field, uint32_t M,
                           const std::vector<uint64_t>& incoming_indices);

struct SubsetDeTrace {
    std::vector<double> pe;
    /// Dressed (uncentered) distributions over all non-empty subsets,
    /// recorded when requested; z[l] matches pe[l], w[l] matches pe[l+1].
    std::vector<SubsetPmf> z;
    std::vector<SubsetPmf> w;
    bool converged = false;
    bool stagnated = false;
    int iterations = 0;
};

/// Exact density evolution over message-set distributions. Internally runs
/// centered on the reference symbol 0 (every message set contains 0, which
/// the scaling/codeword symmetry of the ensemble makes lossless) and uses
/// sumset- and intersection-convolutions of distributions; this equals the
/// per-list chi/eta sums by independence. Caps: q <= 5 and d_c <= 6.
class SubsetDe {
  public:
    SubsetDe(const DegreeDistribution& dd, const Field& field, uint32_t M);

    /// Same engine without the complexity guard (still requires q <= 8);
    /// used for cross-checks at q beyond the guarded surface.
    static SubsetDe unchecked(const DegreeDistribution& dd, const Field& field, uint32_t M);

    SubsetDeTrace run(double eps, const DeOptions& opts = {}) const;

    /// Cardinality marginal of a dressed subset distribution.
    CardinalityPmf cardinality_marginal(const SubsetPmf& dist) const;

    const Field& field() const { return *field_; }

  private:
    SubsetDe(const DegreeDistribution& dd, const Field& field, uint32_t M, bool check_caps);

    // centered state helpers; masks contain bit 0, local index = mask >> 1
    std::vector<double> push_scale_uniform(const std::vector<double>& u) const;
    std::vector<double> sum_conv(const std::vector<double>& a, const std::vector<double>& b) const;
    std::vector<double> and_conv(const std::vector<double>& a, const std::vector<double>& b) const;
    SubsetPmf dress(const std::vector<double>& centered) const;

    DegreeDistribution dd_;
    const Field* field_;
    uint32_t M_;
    size_t dim_;                         // 2^(q-1)
    std::vector<uint32_t> sum_table_;    // dim x dim, local indices
    std::vector<uint32_t> scale_table_;  // (q-1) x dim
    std::vector<int> card_;              // per local index
};

/// Decoding threshold from the exact subset DE (bisection, bracket <= tol).
ThresholdResult subset_decoding_threshold(const DegreeDistribution& dd, const Field& field,
                                          uint32_t M, double tol, const DeOptions& opts = {},
                                          bool unchecked_caps = false);

}  // namespace qpec
