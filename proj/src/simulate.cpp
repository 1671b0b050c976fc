#include "qpec/simulate.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qpec/channel.hpp"
#include "qpec/rng.hpp"

namespace qpec {

namespace {

struct TrialCounts {
    uint64_t symbol_failures = 0;
    uint64_t word_failure = 0;
    uint64_t vtc_word_failure = 0;
    uint64_t wrong_symbols = 0;
    uint64_t iters = 0;
};

TrialCounts run_trial(const DegreeDistribution& dd, const SimConfig& cfg, const Field& field,
                      uint64_t trial) {
    Rng rng = Rng::substream(cfg.seed, trial);
    const TannerGraph graph = sample_tanner_graph(cfg.n, dd, field, rng);
    const QpecParams params(field, cfg.M, cfg.epsilon);
    std::vector<SymbolSet> outputs;
    outputs.reserve(cfg.n);
    for (uint32_t v = 0; v < cfg.n; ++v) outputs.push_back(sample_output(params, 0, rng));
    const DecodeReport report = decode(graph, outputs, cfg.max_iters);

    TrialCounts out;
    for (uint32_t v = 0; v < cfg.n; ++v) {
        if (report.resolved[v] < 0)
            ++out.symbol_failures;
        else if (report.resolved[v] != 0)
            ++out.wrong_symbols;
    }
    out.word_failure = report.posterior_failure ? 1 : 0;
    out.vtc_word_failure = report.failure ? 1 : 0;
    out.iters = report.iterations_used;
    return out;
}

}  // namespace

SimResult simulate_ensemble(const DegreeDistribution& dd, const SimConfig& cfg) {
    const Field field = Field::make(cfg.q);
    SimResult res;
    res.trials = cfg.trials;

    uint64_t symbol_failures = 0, word_failures = 0, vtc_word_failures = 0, wrong = 0,
             iters_total = 0;
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
#pragma omp parallel for schedule(dynamic, 16) \
    reduction(+ : symbol_failures, word_failures, vtc_word_failures, wrong, iters_total)
    for (int64_t t = 0; t < static_cast<int64_t>(cfg.trials); ++t) {
        const TrialCounts c = run_trial(dd, cfg, field, static_cast<uint64_t>(t));
        symbol_failures += c.symbol_failures;
        word_failures += c.word_failure;
        vtc_word_failures += c.vtc_word_failure;
        wrong += c.wrong_symbols;
        iters_total += c.iters;
    }
    res.symbol_failures = symbol_failures;
    res.word_failures = word_failures;
    res.vtc_word_failures = vtc_word_failures;
    res.wrong_symbol_events = wrong;
    res.iterations_total = iters_total;
    return res;
}

SimResult simulate_ensemble_serial(const DegreeDistribution& dd, const SimConfig& cfg) {
    const Field field = Field::make(cfg.q);
    SimResult res;
    res.trials = cfg.trials;
    for (uint64_t t = 0; t < cfg.trials; ++t) {
        const TrialCounts c = run_trial(dd, cfg, field, t);
        res.symbol_failures += c.symbol_failures;
        res.word_failures += c.word_failure;
        res.vtc_word_failures += c.vtc_word_failure;
        res.wrong_symbol_events += c.wrong_symbols;
        res.iterations_total += c.iters;
    }
    return res;
}

}  // namespace qpec
