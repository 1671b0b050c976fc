#pragma once

#include <map>
#include <vector>

#include "qpec/cardinality_de.hpp"
#include "qpec/degree_dist.hpp"

namespace qpec {

/// h_eps(x) = eps * lambda(1 - rho(1-x) - x rho'(1-x)); the one-dimensional
/// recursion that lower-bounds the partially-erased VTC mass for M > q/2.
double h_eps(const DegreeDistribution& dd, double eps, double x);

/// rho(1-x) + x rho'(1-x); decreasing on (0,1) and bounded by 1.
double g_of(const DegreeDistribution& dd, double x);

/// BEC counterpart f_eps(x) = eps * lambda(1 - rho(1-x)).
double f_eps(const DegreeDistribution& dd, double eps, double x);

/// Largest eps for which x = h_eps(x) has no solution in (0, 1]:
/// bisection over eps, fixed-point scan on a dense grid with local
/// refinement around the tightest point.
double epsilon_star(const DegreeDistribution& dd, double tol = 1e-5);

struct LpDesign {
    std::map<int, double> lambda;
    double rate = 0.0;           // design rate against the given rho
    double objective = 0.0;      // sum lambda_i / i
    double eps_effective = 0.0;  // knob actually honored after re-checks
};

/// Rate-maximizing variable distribution subject to h_{eps*}(x) <= x on a
/// grid over (0, 1]. Constraints are re-verified on a 10x finer grid and
/// eps* is tightened slightly on violation.
LpDesign qpec_star_lp(const std::map<int, double>& rho, double eps_star, int d_v,
                      int grid_n = 200);

/// Same construction with the erasure-channel recursion f in place of h.
LpDesign bec_lp(const std::map<int, double>& rho, double eps_th, int d_v, int grid_n = 200);

enum class DesignMode { QpecStar, Bec };

struct DesignStep {
    double knob;      // eps* (QpecStar) or the BEC threshold (Bec)
    double achieved;  // measured cardinality-DE threshold
    double rate;
};

struct DesignResult {
    std::map<int, double> lambda;
    double knob = 0.0;
    double achieved = 0.0;
    double rate = 0.0;
    std::vector<DesignStep> trajectory;
};

/// Outer secant loop on the LP knob until the measured threshold of the
/// designed pair hits target_eth within tol_target.
DesignResult design_iterate(double target_eth, const std::map<int, double>& rho, int d_v,
                            uint32_t q, uint32_t M, PmModel model, DesignMode mode,
                            double tol_target = 0.002, int max_outer = 30);

struct UnionLpStep {
    std::map<int, double> lambda;
    double g_value = 0.0;  // linearized iteration-count objective at the optimum
    int horizon = 0;       // iterations the base pair needs to reach p_tar
    double identity_error = 0.0;  // max_l |sum_i A_{l,i} lambda_i - pe_l|
};

/// One perturbation step: run the union-model DE for the current pair at
/// operating point eps, linearize the failure trajectory in the variable
/// distribution, and pick the feasible perturbation minimizing the
/// linearized iteration count. The edge-rate sum_i lambda_i / i is held
/// fixed so the design rate is preserved.
UnionLpStep union_lp_step(const DegreeDistribution& dd, uint32_t q, uint32_t M, double eps,
                          double p_tar, double delta, int d_v);

struct UnionLpDesignResult {
    std::map<int, double> lambda;
    double operating_eps = 0.0;
    int rounds = 0;
    std::vector<double> g_per_round;
    std::vector<int> horizon_per_round;
};

/// Iterate union_lp_step until the linearized improvement falls below g_tol
/// iterations (the current pair is then kept as the fixpoint), the variable
/// distribution stops moving (l1 distance < 1e-4), or max_rounds. eps <= 0
/// picks 0.98x the initial pair's union-model threshold.
UnionLpDesignResult union_lp_design(const DegreeDistribution& initial, uint32_t q, uint32_t M,
                                    double p_tar, double delta, int max_rounds, double eps = 0.0,
                                    int d_v = 10, double g_tol = 0.02);

}  // namespace qpec
