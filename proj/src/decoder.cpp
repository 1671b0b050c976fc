#include "qpec/decoder.hpp"

#include <algorithm>

namespace qpec {

SymbolSet ctv_message(const Field& field, uint32_t target_label,
                      const std::vector<std::pair<uint32_t, SymbolSet>>& incoming) {
    uint64_t acc = 1;  // {0}, the neutral set under Minkowski sums
    for (const auto& [label, set] : incoming)
        acc = sumset_mask(field, acc, scale_mask(field, set.mask(), field.neg(label)));
    return {field, scale_mask(field, acc, field.inv(target_label))};
}

SymbolSet vtc_message(const SymbolSet& channel_info, const std::vector<SymbolSet>& incoming) {
    uint64_t acc = channel_info.mask();
    for (const auto& s : incoming) acc &= s.mask();
    if (acc == 0) throw EmptyIntersection("variable-node intersection is empty");
    return {channel_info.field(), acc};
}

DecodeReport decode(const TannerGraph& graph, const std::vector<SymbolSet>& outputs,
                    uint32_t max_iters) {
    const Field& f = *graph.field;
    const size_t n_edges = graph.edges.size();
    std::vector<uint64_t> chan(graph.n_vars);
    for (uint32_t v = 0; v < graph.n_vars; ++v) chan[v] = outputs[v].mask();

    std::vector<uint64_t> vtc(n_edges), vtc_next(n_edges), ctv(n_edges, 0);
    std::vector<uint32_t> neg_label(n_edges), inv_label(n_edges);
    for (size_t e = 0; e < n_edges; ++e) {
        vtc[e] = chan[graph.edges[e].var];
        neg_label[e] = f.neg(graph.edges[e].label);
        inv_label[e] = f.inv(graph.edges[e].label);
    }

    DecodeReport report;
    auto unresolved_count = [&]() {
        uint32_t cnt = 0;
        for (uint32_t v = 0; v < graph.n_vars; ++v) {
            uint64_t post = chan[v];
            for (uint32_t i = graph.var_offset[v]; i < graph.var_offset[v + 1]; ++i)
                post &= ctv[graph.var_edges[i]];
            if (__builtin_popcountll(post) > 1) ++cnt;
        }
        return cnt;
    };
    {
        uint32_t cnt = 0;
        for (uint32_t v = 0; v < graph.n_vars; ++v)
            if (__builtin_popcountll(chan[v]) > 1) ++cnt;
        report.unresolved_per_iter.push_back(cnt);
        if (cnt == 0) {
            report.resolved.assign(graph.n_vars, -1);
            for (uint32_t v = 0; v < graph.n_vars; ++v)
                report.resolved[v] = static_cast<int32_t>(__builtin_ctzll(chan[v]));
            return report;
        }
    }

    std::vector<uint64_t> scaled, prefix, suffix;
    std::vector<uint64_t> ctv_prev;
    uint32_t iters = 0;
    for (uint32_t l = 1; l <= max_iters; ++l) {
        // check updates
        for (uint32_t c = 0; c < graph.n_checks; ++c) {
            const uint32_t beg = graph.chk_offset[c], end = graph.chk_offset[c + 1];
            const uint32_t d = end - beg;
            scaled.assign(d, 0);
            for (uint32_t i = 0; i < d; ++i) {
                const uint32_t eid = graph.chk_edges[beg + i];
                scaled[i] = scale_mask(f, vtc[eid], neg_label[eid]);
            }
            prefix.assign(d + 1, 1);
            suffix.assign(d + 1, 1);
            for (uint32_t i = 0; i < d; ++i) prefix[i + 1] = sumset_mask(f, prefix[i], scaled[i]);
            for (uint32_t i = d; i > 0; --i) suffix[i - 1] = sumset_mask(f, suffix[i], scaled[i - 1]);
            for (uint32_t i = 0; i < d; ++i) {
                const uint32_t eid = graph.chk_edges[beg + i];
                const uint64_t others = sumset_mask(f, prefix[i], suffix[i + 1]);
                ctv[eid] = scale_mask(f, others, inv_label[eid]);
            }
        }
        // variable updates
        for (uint32_t v = 0; v < graph.n_vars; ++v) {
            const uint32_t beg = graph.var_offset[v], end = graph.var_offset[v + 1];
            const uint32_t d = end - beg;
            prefix.assign(d + 1, ~uint64_t{0});
            suffix.assign(d + 1, ~uint64_t{0});
            for (uint32_t i = 0; i < d; ++i)
                prefix[i + 1] = prefix[i] & ctv[graph.var_edges[beg + i]];
            for (uint32_t i = d; i > 0; --i)
                suffix[i - 1] = suffix[i] & ctv[graph.var_edges[beg + i - 1]];
            for (uint32_t i = 0; i < d; ++i) {
                const uint64_t m = chan[v] & prefix[i] & suffix[i + 1];
                if (m == 0) throw EmptyIntersection("variable-node intersection is empty");
                vtc_next[graph.var_edges[beg + i]] = m;
            }
        }
        report.unresolved_per_iter.push_back(unresolved_count());
        if (vtc_next == vtc && ctv == ctv_prev) break;  // fixpoint
        iters = l;
        std::swap(vtc, vtc_next);
        ctv_prev = ctv;
    }
    report.iterations_used = iters;

    report.resolved.assign(graph.n_vars, -1);
    for (uint32_t v = 0; v < graph.n_vars; ++v) {
        uint64_t post = chan[v];
        for (uint32_t i = graph.var_offset[v]; i < graph.var_offset[v + 1]; ++i)
            post &= ctv[graph.var_edges[i]];
        if (__builtin_popcountll(post) == 1)
            report.resolved[v] = static_cast<int32_t>(__builtin_ctzll(post));
        else
            report.posterior_failure = true;
    }
    for (size_t e = 0; e < n_edges; ++e)
        if (__builtin_popcountll(vtc[e]) > 1) report.failure = true;
    return report;
}

std::vector<size_t> ml_compatible_set(const std::vector<std::vector<uint32_t>>& codebook,
                                      const std::vector<SymbolSet>& outputs) {
    std::vector<size_t> psi;
    for (size_t i = 0; i < codebook.size(); ++i) {
        bool ok = true;
        for (size_t pos = 0; pos < outputs.size() && ok; ++pos)
            ok = outputs[pos].contains(codebook[i][pos]);
        if (ok) psi.push_back(i);
    }
    return psi;
}

std::vector<int32_t> ml_symbol_decisions(const std::vector<std::vector<uint32_t>>& codebook,
                                         const std::vector<size_t>& psi, uint32_t n) {
    std::vector<int32_t> out(n, -1);
    if (psi.empty()) return out;
    for (uint32_t pos = 0; pos < n; ++pos) {
        const uint32_t first = codebook[psi[0]][pos];
        bool agree = true;
        for (size_t j = 1; j < psi.size() && agree; ++j)
            agree = codebook[psi[j]][pos] == first;
        if (agree) out[pos] = static_cast<int32_t>(first);
    }
    return out;
}

}  // namespace qpec
