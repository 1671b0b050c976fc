#pragma once

#include <cstdint>
#include <vector>

#include "qpec/channel.hpp"
#include "qpec/symbol_set.hpp"
#include "qpec/tanner.hpp"

namespace qpec {

struct DecodeReport {
    /// Per-variable decision: the symbol when the posterior (channel info
    /// intersected with all incoming CTVs) is a singleton, else -1.
    std::vector<int32_t> resolved;
    /// Failure per the message rule: some final VTC message has cardinality > 1.
    bool failure = false;
    /// Failure per the posterior rule: some variable is unresolved.
    bool posterior_failure = false;
    uint32_t iterations_used = 0;
    /// Unresolved-variable count after each iteration; entry 0 is the channel state.
    std::vector<uint32_t> unresolved_per_iter;
};

/// Check-to-variable rule: the possible values of the target variable given
/// the other incoming VTC sets, i.e. (1/h_target) * sum_j (-h_j) * VTC_j
/// as an iterated Minkowski sum of scaled sets.
SymbolSet ctv_message(const Field& field, uint32_t target_label,
                      const std::vector<std::pair<uint32_t, SymbolSet>>& incoming);

/// Variable-to-check rule: channel info intersected with the incoming CTV
/// sets. Throws EmptyIntersection if the result is empty (contract violation
/// on valid channel outputs).
SymbolSet vtc_message(const SymbolSet& channel_info, const std::vector<SymbolSet>& incoming);

/// Flooding-schedule set decoder. Terminates at max_iters or at a fixpoint
/// (no message changed); iterations_used counts iterations that changed
/// something.
DecodeReport decode(const TannerGraph& graph, const std::vector<SymbolSet>& outputs,
                    uint32_t max_iters);

/// Brute-force ML compatibility oracle: indices of all codewords that meet
/// every output set. Position i is ML-resolved iff all survivors agree there.
std::vector<size_t> ml_compatible_set(const std::vector<std::vector<uint32_t>>& codebook,
                                      const std::vector<SymbolSet>& outputs);

/// Per-position ML decisions given the compatible set: the common symbol or -1.
std::vector<int32_t> ml_symbol_decisions(const std::vector<std::vector<uint32_t>>& codebook,
                                         const std::vector<size_t>& psi, uint32_t n);

}  // namespace qpec
