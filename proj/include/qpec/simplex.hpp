#pragma once

#include <vector>

namespace qpec {

struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
};

/// maximize c.x subject to a_ub x <= b_ub, a_eq x = b_eq, x >= 0.
/// Dense two-phase simplex with Bland's rule. Intended for small problems
/// (a handful of variables, up to a few thousand constraints).
LpResult solve_lp(const std::vector<double>& c,
                  const std::vector<std::vector<double>>& a_ub, const std::vector<double>& b_ub,
                  const std::vector<std::vector<double>>& a_eq, const std::vector<double>& b_eq);

}  // namespace qpec
