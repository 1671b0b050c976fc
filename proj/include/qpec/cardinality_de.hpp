#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qpec/degree_dist.hpp"
#include "qpec/errors.hpp"
#include "qpec/gf.hpp"

namespace qpec {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Probability vector over message-set cardinalities; index m in [1, q],
/// entry 0 unused.
using CardinalityPmf = std::vector<double>;

/// Number of ways to realize sets with the given cardinalities (over a
/// q-element universe) so that their intersection has cardinality exactly m.
/// Inclusion-exclusion; exact integer.
BigInt k_intersections(const std::vector<int>& cards, int q, int m);

/// Intersection-cardinality distribution at a variable node: incoming CTV
/// sets with the given cardinalities plus a channel set of cardinality M,
/// all uniform among sets containing the correct symbol.
CardinalityPmf q_m(const std::vector<int>& cards, int M, int q);

/// Exact-rational version of q_m, for oracle-equality tests.
std::vector<BigRational> q_m_exact(const std::vector<int>& cards, int M, int q);

struct SumsetBounds {
    int lower;         // B_L
    int upper;         // B_U
    bool q_condition;  // two entries (distinct positions) sum above q
};

/// Universal sumset-cardinality bounds for sets with the given cardinalities;
/// smallest_prime is the smallest prime factor of q.
SumsetBounds sumset_bounds(const std::vector<int>& cards, int q, int smallest_prime);

enum class PmModel { Exact, LowerBound, UpperBound, Balls, Union };

const char* to_string(PmModel model);
std::optional<PmModel> parse_pm_model(const std::string& name);  // exact|min|max|balls|union

/// Single-ball occupancy chain on q bins; (q+1)x(q+1), states 0..q.
std::vector<std::vector<double>> gamma_balls(int q);

/// Group-occupancy chain: each step unions a uniform kappa-subset into the
/// occupied set. Reduces to gamma_balls at kappa = 1.
std::vector<std::vector<double>> gamma_union(int q, int kappa);

/// Check-node output-cardinality distribution for incoming cardinalities
/// `cards` under the given model. The Exact kind enumerates uniform set
/// tuples (q <= 5, prod cards <= 1e6) and needs the field for sumsets.
CardinalityPmf p_m(PmModel model, const std::vector<int>& cards, const Field& field);

/// Expected number of balls to fill all q bins when balls arrive in groups
/// of kappa placed into distinct bins, from the fundamental matrix of the
/// absorbing chain.
double expected_absorption(int q, int kappa);

struct DeOptions {
    int max_iters = 2000;
    double pe_target = 1e-9;
    double stagnation_eps = 1e-14;
    int stagnation_window = 10;
    bool record_distributions = false;
};

struct DeTrace {
    std::vector<double> pe;               // pe[l] for l = 0, 1, ...
    std::vector<CardinalityPmf> z;        // recorded when requested
    std::vector<CardinalityPmf> w;        // w[l] corresponds to pe[l+1]
    bool converged = false;               // pe dropped below pe_target
    bool stagnated = false;               // stuck above target
    int iterations = 0;
};

/// Cardinality-based density evolution for a degree-distribution ensemble
/// over the QPEC(q, M), with the chosen P_m model. The check-node update
/// sums over multisets of incoming cardinalities with multinomial weights;
/// the variable-node update composes the intersection-cardinality chain,
/// which is algebraically identical to the multiset form of Q_m.
class CardinalityDe {
  public:
    CardinalityDe(const DegreeDistribution& dd, uint32_t q, uint32_t M, PmModel model);

    DeTrace run(double eps, const DeOptions& opts = {}) const;

    CardinalityPmf check_update(const CardinalityPmf& z) const;  // normalized
    /// Variable update with all edge mass on a single degree; normalized.
    CardinalityPmf variable_update_single_degree(const CardinalityPmf& w, int degree,
                                                 double eps) const;
    CardinalityPmf variable_update(const CardinalityPmf& w, double eps) const;

    uint32_t q() const { return q_; }
    uint32_t M() const { return M_; }

  private:
    DegreeDistribution dd_;
    uint32_t q_, M_;
    PmModel model_;
    std::optional<Field> field_;  // needed by the Exact kind only
    // per check degree: list of (cards multiset, multinomial weight, P_m pmf);
    // pm is filled lazily the first time the multiset carries probability, so
    // expensive exact-kind enumerations only happen for reachable multisets.
    // A CardinalityDe instance is therefore not shareable across threads.
    struct CheckTerm {
        std::vector<int> cards;
        double weight;
        mutable CardinalityPmf pm;
    };
    std::map<int, std::vector<CheckTerm>> check_terms_;
    // hypergeometric intersection-chain transitions, one (q+1)^2 matrix per
    // incoming cardinality
    std::vector<std::vector<std::vector<double>>> hyp_;
};

struct ThresholdResult {
    double lower = 0.0;
    double upper = 0.0;
    double midpoint() const { return 0.5 * (lower + upper); }
};

/// Largest partial-erasure probability for which density evolution drives
/// the failure probability below the convergence target. Bisection; the
/// returned bracket has width <= tol.
ThresholdResult decoding_threshold(const DegreeDistribution& dd, uint32_t q, uint32_t M,
                                   PmModel model, double tol, const DeOptions& opts = {});

int smallest_prime_factor(int n);

}  // namespace qpec
