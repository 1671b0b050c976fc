#pragma once

#include <cstdint>
#include <vector>

#include "qpec/degree_dist.hpp"
#include "qpec/errors.hpp"
#include "qpec/gf.hpp"
#include "qpec/rng.hpp"

namespace qpec {

/// Labeled bipartite graph instance of an LDPC ensemble. Edge labels are
/// nonzero field elements; the parity-check equation of check c is
/// sum_{v in N(c)} h_{c,v} * v = 0. No parallel edges.
struct TannerGraph {
    struct Edge {
        uint32_t var;
        uint32_t chk;
        uint32_t label;
    };

    const Field* field = nullptr;
    uint32_t n_vars = 0;
    uint32_t n_checks = 0;
    std::vector<Edge> edges;

    // CSR adjacency: edge indices grouped per node
    std::vector<uint32_t> var_offset, var_edges;
    std::vector<uint32_t> chk_offset, chk_edges;

    void build_adjacency();

    /// Dense parity-check matrix, n_checks x n_vars.
    std::vector<std::vector<uint32_t>> parity_matrix() const;
};

/// Configuration-model sample with the exact edge-degree histogram implied by
/// dd and n (largest-remainder apportionment). Parallel edges are removed by
/// local re-switching, with a full resample as fallback.
TannerGraph sample_tanner_graph(uint32_t n, const DegreeDistribution& dd, const Field& field,
                                Rng& rng);

/// All codewords of the code defined by the graph, for tiny codes
/// (q^(n - rank) <= 2^20). Order: lexicographic in the free-symbol counter.
std::vector<std::vector<uint32_t>> enumerate_codebook(const TannerGraph& graph);

namespace detail {

/// Largest-remainder apportionment of `total` items to weights.
std::vector<uint32_t> apportion(uint32_t total, const std::vector<double>& weights);

/// Node counts per degree for both sides; throws InfeasibleDegreeSequence if
/// no integer check-degree histogram matches the variable-side edge count.
struct NodeCounts {
    std::vector<std::pair<int, uint32_t>> var_nodes;  // (degree, count)
    std::vector<std::pair<int, uint32_t>> chk_nodes;
    uint32_t n_edges;
};
NodeCounts node_counts(uint32_t n, const DegreeDistribution& dd);

/// Raw configuration-model matching (may contain parallel edges); exposed so
/// tests can check socket-permutation marginals before the simplification.
std::vector<std::pair<uint32_t, uint32_t>> raw_matching(const NodeCounts& counts, Rng& rng);

}  // namespace detail

}  // namespace qpec
