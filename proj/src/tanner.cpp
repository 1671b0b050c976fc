#include "qpec/tanner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

namespace qpec {

namespace detail {

std::vector<uint32_t> apportion(uint32_t total, const std::vector<double>& weights) {
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<uint32_t> counts(weights.size());
    std::vector<std::pair<double, size_t>> rema(weights.size());
    uint32_t assigned = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
        const double target = total * weights[i] / wsum;
        counts[i] = static_cast<uint32_t>(std::floor(target));
        assigned += counts[i];
        rema[i] = {target - counts[i], i};
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (uint32_t r = 0; r < total - assigned; ++r) ++counts[rema[r % rema.size()].second];
    return counts;
}

NodeCounts node_counts(uint32_t n, const DegreeDistribution& dd) {
    NodeCounts out;
    std::vector<int> vdegs;
    std::vector<double> vweights;
    for (const auto& [i, c] : dd.lambda()) {
        vdegs.push_back(i);
        vweights.push_back(c / i);
    }
    const auto vcounts = apportion(n, vweights);
    uint32_t n_edges = 0;
    for (size_t i = 0; i < vdegs.size(); ++i) {
        if (vcounts[i] == 0 && dd.lambda().size() > 1)
            throw InfeasibleDegreeSequence("n too small to realize every variable degree");
        out.var_nodes.emplace_back(vdegs[i], vcounts[i]);
        n_edges += vdegs[i] * vcounts[i];
    }
    out.n_edges = n_edges;

    // check side: integer node counts m_j with sum_j j*m_j == n_edges,
    // close to the targets n_edges * rho_j / j
    std::vector<int> cdegs;
    std::vector<double> targets;
    for (const auto& [j, c] : dd.rho()) {
        cdegs.push_back(j);
        targets.push_back(n_edges * c / j);
    }
    std::vector<uint32_t> mcounts(cdegs.size());
    std::vector<std::pair<double, size_t>> rema(cdegs.size());
    uint32_t used = 0;
    for (size_t i = 0; i < cdegs.size(); ++i) {
        mcounts[i] = static_cast<uint32_t>(std::floor(targets[i]));
        used += mcounts[i] * cdegs[i];
        rema[i] = {targets[i] - mcounts[i], i};
    }
    if (used > n_edges) throw InfeasibleDegreeSequence("check-degree rounding overflow");
    uint32_t deficit = n_edges - used;
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    bool progress = true;
    while (deficit > 0 && progress) {
        progress = false;
        for (auto& [frac, i] : rema) {
            if (static_cast<uint32_t>(cdegs[i]) <= deficit) {
                ++mcounts[i];
                deficit -= cdegs[i];
                frac -= 1.0;
                progress = true;
                break;
            }
        }
    }
    if (deficit > 0) {
        // try a single degree swap j1 -> j2 with j2 - j1 == deficit
        bool fixed = false;
        for (size_t a = 0; a < cdegs.size() && !fixed; ++a)
            for (size_t b = 0; b < cdegs.size() && !fixed; ++b)
                if (mcounts[a] > 0 && cdegs[b] - cdegs[a] == static_cast<int>(deficit)) {
                    --mcounts[a];
                    ++mcounts[b];
                    deficit = 0;
                    fixed = true;
                }
        if (!fixed)
            throw InfeasibleDegreeSequence("edge total not representable by check degrees");
    }
    for (size_t i = 0; i < cdegs.size(); ++i) {
        if (mcounts[i] == 0 && dd.rho().size() > 1)
            throw InfeasibleDegreeSequence("n too small to realize every check degree");
        out.chk_nodes.emplace_back(cdegs[i], mcounts[i]);
    }
    return out;
}

std::vector<std::pair<uint32_t, uint32_t>> raw_matching(const NodeCounts& counts, Rng& rng) {
    std::vector<uint32_t> var_sockets, chk_sockets;
    uint32_t v = 0;
    for (const auto& [deg, cnt] : counts.var_nodes)
        for (uint32_t i = 0; i < cnt; ++i, ++v)
            for (int d = 0; d < deg; ++d) var_sockets.push_back(v);
    uint32_t c = 0;
    for (const auto& [deg, cnt] : counts.chk_nodes)
        for (uint32_t i = 0; i < cnt; ++i, ++c)
            for (int d = 0; d < deg; ++d) chk_sockets.push_back(c);
    // Fisher-Yates over check sockets
    for (size_t i = chk_sockets.size(); i > 1; --i)
        std::swap(chk_sockets[i - 1], chk_sockets[rng.below(i)]);
    std::vector<std::pair<uint32_t, uint32_t>> pairs(var_sockets.size());
    for (size_t i = 0; i < var_sockets.size(); ++i)
        pairs[i] = {var_sockets[i], chk_sockets[i]};
    return pairs;
}

}  // namespace detail

void TannerGraph::build_adjacency() {
    var_offset.assign(n_vars + 1, 0);
    chk_offset.assign(n_checks + 1, 0);
    for (const auto& e : edges) {
        ++var_offset[e.var + 1];
        ++chk_offset[e.chk + 1];
    }
    for (uint32_t i = 0; i < n_vars; ++i) var_offset[i + 1] += var_offset[i];
    for (uint32_t i = 0; i < n_checks; ++i) chk_offset[i + 1] += chk_offset[i];
    var_edges.resize(edges.size());
    chk_edges.resize(edges.size());
    std::vector<uint32_t> vpos(var_offset.begin(), var_offset.end() - 1);
    std::vector<uint32_t> cpos(chk_offset.begin(), chk_offset.end() - 1);
    for (uint32_t e = 0; e < edges.size(); ++e) {
        var_edges[vpos[edges[e].var]++] = e;
        chk_edges[cpos[edges[e].chk]++] = e;
    }
}

std::vector<std::vector<uint32_t>> TannerGraph::parity_matrix() const {
    std::vector<std::vector<uint32_t>> h(n_checks, std::vector<uint32_t>(n_vars, 0));
    for (const auto& e : edges) h[e.chk][e.var] = field->add(h[e.chk][e.var], e.label);
    return h;
}

TannerGraph sample_tanner_graph(uint32_t n, const DegreeDistribution& dd, const Field& field,
                                Rng& rng) {
    const auto counts = detail::node_counts(n, dd);
    constexpr int kMaxResamples = 64;
    for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
        auto pairs = detail::raw_matching(counts, rng);
        // remove parallel edges by re-switching check endpoints
        const size_t max_switches = 200 * pairs.size() + 1000;
        size_t switches = 0;
        auto key = [](uint32_t v, uint32_t c) { return (uint64_t{v} << 32) | c; };
        std::unordered_multiset<uint64_t> seen;
        for (const auto& [v, c] : pairs) seen.insert(key(v, c));
        bool ok = true;
        for (size_t i = 0; i < pairs.size() && ok; ++i) {
            while (seen.count(key(pairs[i].first, pairs[i].second)) > 1) {
                if (++switches > max_switches) {
                    ok = false;
                    break;
                }
                const size_t j = rng.below(pairs.size());
                if (j == i) continue;
                const auto [vi, ci] = pairs[i];
                const auto [vj, cj] = pairs[j];
                if (ci == cj) continue;
                if (seen.count(key(vi, cj)) > 0 || seen.count(key(vj, ci)) > 0) continue;
                seen.erase(seen.find(key(vi, ci)));
                seen.erase(seen.find(key(vj, cj)));
                pairs[i].second = cj;
                pairs[j].second = ci;
                seen.insert(key(vi, cj));
                seen.insert(key(vj, ci));
            }
        }
        if (!ok) continue;
        TannerGraph g;
        g.field = &field;
        g.n_vars = n;
        uint32_t n_checks = 0;
        for (const auto& [deg, cnt] : counts.chk_nodes) n_checks += cnt;
        g.n_checks = n_checks;
        g.edges.reserve(pairs.size());
        for (const auto& [v, c] : pairs)
            g.edges.push_back({v, c, 1 + static_cast<uint32_t>(rng.below(field.q() - 1))});
        g.build_adjacency();
        return g;
    }
    throw InfeasibleDegreeSequence("could not remove parallel edges");
}

std::vector<std::vector<uint32_t>> enumerate_codebook(const TannerGraph& graph) {
    const Field& f = *graph.field;
    const uint32_t n = graph.n_vars;
    auto h = graph.parity_matrix();
    // row-reduce to find pivot columns
    uint32_t rank = 0;
    std::vector<uint32_t> pivot_col;
    for (uint32_t col = 0; col < n && rank < h.size(); ++col) {
        uint32_t sel = rank;
        while (sel < h.size() && h[sel][col] == 0) ++sel;
        if (sel == h.size()) continue;
        std::swap(h[rank], h[sel]);
        const uint32_t inv = f.inv(h[rank][col]);
        for (uint32_t j = 0; j < n; ++j) h[rank][j] = f.mul(h[rank][j], inv);
        for (uint32_t r = 0; r < h.size(); ++r) {
            if (r == rank || h[r][col] == 0) continue;
            const uint32_t factor = h[r][col];
            for (uint32_t j = 0; j < n; ++j)
                h[r][j] = f.sub(h[r][j], f.mul(factor, h[rank][j]));
        }
        pivot_col.push_back(col);
        ++rank;
    }
    std::vector<bool> is_pivot(n, false);
    for (uint32_t c : pivot_col) is_pivot[c] = true;
    std::vector<uint32_t> free_cols;
    for (uint32_t c = 0; c < n; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);

    const uint32_t k = static_cast<uint32_t>(free_cols.size());
    double size = std::pow(static_cast<double>(f.q()), static_cast<double>(k));
    if (size > static_cast<double>(1 << 20))
        throw ComplexityCapExceeded("codebook too large to enumerate");

    // nullspace basis: one vector per free column
    std::vector<std::vector<uint32_t>> basis(k, std::vector<uint32_t>(n, 0));
    for (uint32_t b = 0; b < k; ++b) {
        basis[b][free_cols[b]] = 1;
        for (uint32_t r = 0; r < rank; ++r)
            basis[b][pivot_col[r]] = f.neg(h[r][free_cols[b]]);
    }

    std::vector<std::vector<uint32_t>> codebook;
    codebook.reserve(static_cast<size_t>(size));
    std::vector<uint32_t> coeff(k, 0), word(n, 0);
    while (true) {
        codebook.push_back(word);
        // increment base-q counter, updating word incrementally
        uint32_t pos = 0;
        while (pos < k) {
            coeff[pos] = (coeff[pos] + 1) % f.q();
            for (uint32_t j = 0; j < n; ++j)
                word[j] = f.add(word[j], basis[pos][j]);
            if (coeff[pos] != 0) break;
            ++pos;
        }
        if (pos == k) break;
    }
    return codebook;
}

}  // namespace qpec
