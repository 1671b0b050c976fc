#pragma once

#include <cstdint>

#include "qpec/decoder.hpp"
#include "qpec/degree_dist.hpp"

namespace qpec {

struct SimConfig {
    uint32_t q = 4;
    uint32_t M = 2;
    double epsilon = 0.5;
    uint32_t n = 512;
    uint64_t trials = 1000;
    uint32_t max_iters = 80;
    uint64_t seed = 1;
    int threads = 0;  // 0: use OpenMP default
};

struct SimResult {
    uint64_t trials = 0;
    uint64_t symbol_failures = 0;   // unresolved variables, summed over trials
    uint64_t word_failures = 0;     // trials with any unresolved variable
    uint64_t vtc_word_failures = 0; // trials failing the VTC message rule
    uint64_t wrong_symbol_events = 0;  // resolved-to-wrong-value count (must stay 0)
    uint64_t iterations_total = 0;

    double symbol_failure_rate(uint32_t n) const {
        return static_cast<double>(symbol_failures) / (static_cast<double>(trials) * n);
    }
    double word_failure_rate() const {
        return static_cast<double>(word_failures) / static_cast<double>(trials);
    }
    double mean_iters() const {
        return static_cast<double>(iterations_total) / static_cast<double>(trials);
    }
};

/// Monte Carlo over fresh ensemble samples: each trial draws a graph and a
/// channel realization around the all-zero codeword from substream
/// (seed, trial), decodes, and accumulates integer counts. Results are
/// independent of thread count.
SimResult simulate_ensemble(const DegreeDistribution& dd, const SimConfig& cfg);

/// Serial reference path, kept for testing and benchmarking against the
/// OpenMP version. Bit-identical results by construction.
SimResult simulate_ensemble_serial(const DegreeDistribution& dd, const SimConfig& cfg);

}  // namespace qpec
