#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "qpec/decoder.hpp"
#include "qpec/simulate.hpp"

using namespace qpec;

namespace {

TannerGraph graph_from_rows(const Field& f,
                            const std::vector<std::vector<uint32_t>>& rows) {
    TannerGraph g;
    g.field = &f;
    g.n_checks = static_cast<uint32_t>(rows.size());
    g.n_vars = static_cast<uint32_t>(rows[0].size());
    for (uint32_t c = 0; c < g.n_checks; ++c)
        for (uint32_t v = 0; v < g.n_vars; ++v)
            if (rows[c][v] != 0) g.edges.push_back({v, c, rows[c][v]});
    g.build_adjacency();
    return g;
}

// reference message-level peeling decoder for the full-erasure case (M = q):
// a message is either a known value or an erasure
struct PeelingTrace {
    std::vector<uint32_t> unresolved_per_iter;
    std::vector<int32_t> resolved;
};

PeelingTrace reference_peeling(const TannerGraph& g, const std::vector<SymbolSet>& outputs,
                               uint32_t max_iters) {
    const Field& f = *g.field;
    const size_t ne = g.edges.size();
    std::vector<int32_t> chan(g.n_vars, -1);
    for (uint32_t v = 0; v < g.n_vars; ++v)
        if (outputs[v].cardinality() == 1) chan[v] = static_cast<int32_t>(outputs[v].elements()[0]);
    std::vector<int32_t> vtc(ne), ctv(ne, -1), vtc_next(ne), ctv_prev;
    for (size_t e = 0; e < ne; ++e) vtc[e] = chan[g.edges[e].var];

    PeelingTrace trace;
    auto posterior = [&](uint32_t v) -> int32_t {
        if (chan[v] >= 0) return chan[v];
        for (uint32_t i = g.var_offset[v]; i < g.var_offset[v + 1]; ++i)
            if (ctv[g.var_edges[i]] >= 0) return ctv[g.var_edges[i]];
        return -1;
    };
    trace.unresolved_per_iter.push_back(
        static_cast<uint32_t>(std::count(chan.begin(), chan.end(), -1)));
    if (trace.unresolved_per_iter[0] == 0) {
        trace.resolved = chan;
        return trace;
    }
    for (uint32_t l = 1; l <= max_iters; ++l) {
        for (uint32_t c = 0; c < g.n_checks; ++c) {
            for (uint32_t i = g.chk_offset[c]; i < g.chk_offset[c + 1]; ++i) {
                const uint32_t eid = g.chk_edges[i];
                uint32_t acc = 0;
                bool known = true;
                for (uint32_t j = g.chk_offset[c]; j < g.chk_offset[c + 1] && known; ++j) {
                    if (j == i) continue;
                    const uint32_t other = g.chk_edges[j];
                    if (vtc[other] < 0)
                        known = false;
                    else
                        acc = f.add(acc, f.mul(g.edges[other].label,
                                               static_cast<uint32_t>(vtc[other])));
                }
                ctv[eid] = known ? static_cast<int32_t>(f.mul(f.inv(g.edges[eid].label),
                                                              f.neg(acc)))
                                 : -1;
            }
        }
        for (uint32_t v = 0; v < g.n_vars; ++v) {
            for (uint32_t i = g.var_offset[v]; i < g.var_offset[v + 1]; ++i) {
                const uint32_t eid = g.var_edges[i];
                int32_t val = chan[v];
                for (uint32_t j = g.var_offset[v]; j < g.var_offset[v + 1] && val < 0; ++j) {
                    if (j == i) continue;
                    val = ctv[g.var_edges[j]];
                }
                vtc_next[eid] = val;
            }
        }
        uint32_t unresolved = 0;
        for (uint32_t v = 0; v < g.n_vars; ++v) unresolved += posterior(v) < 0;
        trace.unresolved_per_iter.push_back(unresolved);
        if (vtc_next == vtc && ctv == ctv_prev) break;
        std::swap(vtc, vtc_next);
        ctv_prev = ctv;
    }
    trace.resolved.resize(g.n_vars);
    for (uint32_t v = 0; v < g.n_vars; ++v) trace.resolved[v] = posterior(v);
    return trace;
}

}  // namespace

TEST_CASE("CTV rule reproduces the worked GF(16) example") {
    const Field f = Field::make(16);
    // alpha = x (encoding 2); incoming {0, a^0} on a label-a^2 edge and {0}
    // on a label-a^3 edge, outgoing edge label a^1
    const uint32_t a = f.alpha();
    const uint32_t a2 = f.pow(a, 2), a3 = f.pow(a, 3);
    const SymbolSet out = ctv_message(
        f, a, {{a2, SymbolSet::of(f, {0, 1})}, {a3, SymbolSet::of(f, {0})}});
    CHECK(out == SymbolSet::of(f, {0, a}));
}

TEST_CASE("CTV degenerate cases") {
    const Field f = Field::make(5);
    // degree-2 check with equal labels: incoming set scaled by -1
    const SymbolSet in = SymbolSet::of(f, {1, 2});
    const SymbolSet out = ctv_message(f, 3, {{3, in}});
    CHECK(out == scale(in, f.neg(1)));
    // all incoming singletons: the parity-solved value
    const SymbolSet s = ctv_message(f, 2, {{1, SymbolSet::of(f, {3})},
                                           {4, SymbolSet::of(f, {2})}});
    // solve 2*v + 1*3 + 4*2 = 0 -> v = -(11)/2 = -(1)/2 mod 5 = 2
    CHECK(s == SymbolSet::of(f, {2}));
}

TEST_CASE("VTC rule is intersection with channel information") {
    const Field f = Field::make(16);
    const uint32_t a = f.alpha();
    const SymbolSet chan = SymbolSet::of(f, {0, 1, f.pow(a, 2), f.pow(a, 3)});
    const SymbolSet c1 = SymbolSet::of(f, {0, 1, a});
    const SymbolSet c2 = SymbolSet::of(f, {0, 1, f.pow(a, 2)});
    CHECK(vtc_message(chan, {c1, c2}) == SymbolSet::of(f, {0, 1}));

    // singleton channel info wins regardless of CTVs
    CHECK(vtc_message(SymbolSet::of(f, {5}), {SymbolSet::full(f)}) == SymbolSet::of(f, {5}));
    // idempotence
    CHECK(vtc_message(c1, {c1, c1}) == c1);
    CHECK_THROWS_AS(vtc_message(SymbolSet::of(f, {1}), {SymbolSet::of(f, {2})}),
                    EmptyIntersection);
}

TEST_CASE("single-check hand simulations over GF(4)") {
    const Field f = Field::make(4);
    const TannerGraph g = graph_from_rows(f, {{1, 1}});

    SUBCASE("no erasures resolves in 0 iterations") {
        const auto r = decode(g, {SymbolSet::of(f, {0}), SymbolSet::of(f, {0})}, 80);
        CHECK(r.iterations_used == 0);
        CHECK_FALSE(r.failure);
        CHECK(r.resolved == std::vector<int32_t>{0, 0});
    }
    SUBCASE("one erased variable is solved through the check") {
        const auto r = decode(g, {SymbolSet::of(f, {0}), SymbolSet::of(f, {0, 1})}, 80);
        CHECK(r.iterations_used == 1);
        // the VTC-rule flag stays set for this degree-1 variable (its only
        // outgoing message cannot use the check), but the posterior resolves
        CHECK_FALSE(r.posterior_failure);
        CHECK(r.resolved == std::vector<int32_t>{0, 0});
    }
    SUBCASE("two erased variables stay ambiguous") {
        const auto r = decode(g, {SymbolSet::of(f, {0, 1}), SymbolSet::of(f, {0, 1})}, 80);
        CHECK(r.failure);
        CHECK(r.posterior_failure);
        CHECK(r.resolved == std::vector<int32_t>{-1, -1});
        CHECK(r.iterations_used == 1);  // the iteration that exposed the fixpoint
    }
}

TEST_CASE("decode matches a reference loop built from the message rules") {
    // cross-check the fast engine against a direct implementation using the
    // public ctv_message / vtc_message operations, on random small instances
    for (uint32_t q : {4u, 5u}) {
        const Field f = Field::make(q);
        const auto dd = DegreeDistribution::regular(3, 6);
        for (uint64_t trial = 0; trial < 30; ++trial) {
            Rng rng = Rng::substream(500 + q, trial);
            const TannerGraph g = sample_tanner_graph(12, dd, f, rng);
            const QpecParams params(f, 2, 0.6);
            std::vector<SymbolSet> outputs;
            for (uint32_t v = 0; v < g.n_vars; ++v)
                outputs.push_back(sample_output(params, 0, rng));

            const auto report = decode(g, outputs, 40);

            // reference flooding loop
            const size_t ne = g.edges.size();
            std::vector<SymbolSet> vtc(ne, SymbolSet::empty_set(f));
            std::vector<SymbolSet> ctv(ne, SymbolSet::empty_set(f));
            for (size_t e = 0; e < ne; ++e) vtc[e] = outputs[g.edges[e].var];
            std::vector<int> prev_cards(ne, 100);
            for (int l = 1; l <= 40; ++l) {
                for (uint32_t c = 0; c < g.n_checks; ++c)
                    for (uint32_t i = g.chk_offset[c]; i < g.chk_offset[c + 1]; ++i) {
                        const uint32_t eid = g.chk_edges[i];
                        std::vector<std::pair<uint32_t, SymbolSet>> incoming;
                        for (uint32_t j = g.chk_offset[c]; j < g.chk_offset[c + 1]; ++j)
                            if (j != i)
                                incoming.push_back({g.edges[g.chk_edges[j]].label,
                                                    vtc[g.chk_edges[j]]});
                        ctv[eid] = ctv_message(f, g.edges[eid].label, incoming);
                        CHECK(ctv[eid].contains(0));  // transmitted symbol survives
                    }
                bool changed = false;
                for (uint32_t v = 0; v < g.n_vars; ++v)
                    for (uint32_t i = g.var_offset[v]; i < g.var_offset[v + 1]; ++i) {
                        const uint32_t eid = g.var_edges[i];
                        std::vector<SymbolSet> incoming;
                        for (uint32_t j = g.var_offset[v]; j < g.var_offset[v + 1]; ++j)
                            if (j != i) incoming.push_back(ctv[g.var_edges[j]]);
                        const SymbolSet next = vtc_message(outputs[v], incoming);
                        CHECK(next.contains(0));
                        // per-edge VTC cardinality never grows
                        CHECK(next.cardinality() <= vtc[eid].cardinality());
                        changed = changed || next != vtc[eid];
                        vtc[eid] = next;
                    }
                if (!changed) break;
            }
            // posteriors agree with the fast engine
            for (uint32_t v = 0; v < g.n_vars; ++v) {
                SymbolSet post = outputs[v];
                for (uint32_t i = g.var_offset[v]; i < g.var_offset[v + 1]; ++i)
                    post = intersect(post, ctv[g.var_edges[i]]);
                if (post.cardinality() == 1)
                    CHECK(report.resolved[v] == static_cast<int32_t>(post.elements()[0]));
                else
                    CHECK(report.resolved[v] == -1);
            }
        }
    }
}

TEST_CASE("M = q reduces to erasure peeling (trace equivalence)") {
    const Field f = Field::make(8);
    const auto dd = DegreeDistribution::regular(3, 6);
    for (uint64_t trial = 0; trial < 40; ++trial) {
        Rng rng = Rng::substream(900, trial);
        const TannerGraph g = sample_tanner_graph(24, dd, f, rng);
        const QpecParams params(f, 8, 0.45);
        std::vector<SymbolSet> outputs;
        for (uint32_t v = 0; v < g.n_vars; ++v) outputs.push_back(sample_output(params, 0, rng));

        const auto report = decode(g, outputs, 60);
        const auto peel = reference_peeling(g, outputs, 60);
        CHECK(report.unresolved_per_iter == peel.unresolved_per_iter);
        CHECK(report.resolved == peel.resolved);
    }
}

TEST_CASE("ML compatibility oracle") {
    const Field f2 = Field::make(2);
    // binary repetition code {00, 11}
    const std::vector<std::vector<uint32_t>> code{{0, 0}, {1, 1}};
    const auto psi = ml_compatible_set(code, {SymbolSet::of(f2, {0, 1}), SymbolSet::of(f2, {0})});
    CHECK(psi == std::vector<size_t>{0});

    // no erasures: the transmitted word only
    const auto psi2 = ml_compatible_set(code, {SymbolSet::of(f2, {1}), SymbolSet::of(f2, {1})});
    CHECK(psi2 == std::vector<size_t>{1});
    CHECK(ml_symbol_decisions(code, psi2, 2) == std::vector<int32_t>{1, 1});
}

TEST_CASE("iterative decoding is never better than ML on small instances") {
    const Field f = Field::make(4);
    const auto dd = DegreeDistribution::regular(2, 4);
    for (uint64_t trial = 0; trial < 60; ++trial) {
        Rng rng = Rng::substream(321, trial);
        const TannerGraph g = sample_tanner_graph(8, dd, f, rng);
        const auto code = enumerate_codebook(g);
        const QpecParams params(f, 2, 0.7);
        std::vector<SymbolSet> outputs;
        for (uint32_t v = 0; v < g.n_vars; ++v) outputs.push_back(sample_output(params, 0, rng));
        const auto report = decode(g, outputs, 40);
        const auto psi = ml_compatible_set(code, outputs);
        const auto ml = ml_symbol_decisions(code, psi, g.n_vars);
        for (uint32_t v = 0; v < g.n_vars; ++v) {
            if (report.resolved[v] >= 0) {
                CHECK(ml[v] == report.resolved[v]);  // ML resolves it too, same value
                CHECK(ml[v] == 0);
            }
        }
    }
}

TEST_CASE("pinned instance where ML resolves but iterative decoding fails") {
    // three parity checks over GF(2) whose erased triple {v0, v1, v2} is a
    // stopping set that supports no codeword: message passing stalls, the
    // compatibility set is the zero word alone
    const Field f = Field::make(2);
    const TannerGraph g = graph_from_rows(f, {{1, 1, 1, 0, 1, 0, 0},
                                              {0, 1, 1, 1, 0, 1, 0},
                                              {1, 1, 0, 1, 0, 0, 1}});
    std::vector<SymbolSet> outputs;
    for (uint32_t v = 0; v < 7; ++v)
        outputs.push_back(v < 3 ? SymbolSet::full(f) : SymbolSet::of(f, {0}));

    const auto report = decode(g, outputs, 80);
    CHECK(report.posterior_failure);
    CHECK(report.resolved[0] == -1);
    CHECK(report.resolved[1] == -1);
    CHECK(report.resolved[2] == -1);

    const auto code = enumerate_codebook(g);
    CHECK(code.size() == 16);
    const auto psi = ml_compatible_set(code, outputs);
    REQUIRE(psi.size() == 1);
    const auto ml = ml_symbol_decisions(code, psi, 7);
    for (uint32_t v = 0; v < 7; ++v) CHECK(ml[v] == 0);
}

TEST_CASE("Monte Carlo harness: correctness and serial/parallel agreement") {
    const auto dd = DegreeDistribution::regular(3, 6);
    SimConfig cfg;
    cfg.q = 8;
    cfg.M = 4;
    cfg.epsilon = 0.55;
    cfg.n = 96;
    cfg.trials = 400;
    cfg.max_iters = 80;
    cfg.seed = 77;
    const SimResult a = simulate_ensemble(dd, cfg);
    const SimResult b = simulate_ensemble_serial(dd, cfg);
    CHECK(a.wrong_symbol_events == 0);  // never resolves to a wrong value
    CHECK(a.symbol_failures == b.symbol_failures);
    CHECK(a.word_failures == b.word_failures);
    CHECK(a.vtc_word_failures == b.vtc_word_failures);
    CHECK(a.iterations_total == b.iterations_total);

    // same seed, same result; different seed, different result
    const SimResult c = simulate_ensemble(dd, cfg);
    CHECK(a.symbol_failures == c.symbol_failures);
    cfg.seed = 78;
    const SimResult d = simulate_ensemble(dd, cfg);
    CHECK(a.symbol_failures != d.symbol_failures);
}
