#include "qpec/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qpec {

namespace {

constexpr double kEps = 1e-9;

// Standard tableau simplex over rows [0..m) and an objective row [m].
// cols: n structural + m1 slacks + m artificials + rhs.
struct Tableau {
    int m, n_total;
    std::vector<std::vector<double>> a;  // (m + 1) x (n_total + 1)
    std::vector<int> basis;              // basic column per row

    double& rhs(int r) { return a[r][n_total]; }

    void pivot(int row, int col) {
        const double p = a[row][col];
        for (int j = 0; j <= n_total; ++j) a[row][j] /= p;
        for (int r = 0; r <= m; ++r) {
            if (r == row) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (int j = 0; j <= n_total; ++j) a[r][j] -= f * a[row][j];
        }
        basis[row] = col;
    }

    // Bland's rule: entering = lowest-index column with positive reduced
    // cost (we maximize), leaving = lowest-index basic row among min ratios.
    // allowed(col) filters out retired artificial columns.
    bool iterate(const std::vector<bool>& allowed, bool* unbounded) {
        int col = -1;
        for (int j = 0; j < n_total; ++j)
            if (allowed[j] && a[m][j] > kEps) {
                col = j;
                break;
            }
        if (col < 0) return false;
        int row = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < m; ++r) {
            if (a[r][col] > kEps) {
                const double ratio = rhs(r) / a[r][col];
                if (ratio < best - kEps ||
                    (ratio < best + kEps && (row < 0 || basis[r] < basis[row]))) {
                    best = ratio;
                    row = r;
                }
            }
        }
        if (row < 0) {
            *unbounded = true;
            return false;
        }
        pivot(row, col);
        return true;
    }
};

}  // namespace

LpResult solve_lp(const std::vector<double>& c,
                  const std::vector<std::vector<double>>& a_ub, const std::vector<double>& b_ub,
                  const std::vector<std::vector<double>>& a_eq, const std::vector<double>& b_eq) {
    const int n = static_cast<int>(c.size());
    const int m1 = static_cast<int>(a_ub.size());
    const int m2 = static_cast<int>(a_eq.size());
    const int m = m1 + m2;

    Tableau t;
    t.m = m;
    t.n_total = n + m1 + m;
    t.a.assign(m + 1, std::vector<double>(t.n_total + 1, 0.0));
    t.basis.assign(m, -1);

    for (int r = 0; r < m; ++r) {
        const auto& row = r < m1 ? a_ub[r] : a_eq[r - m1];
        const double b = r < m1 ? b_ub[r] : b_eq[r - m1];
        const double sign = b < 0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) t.a[r][j] = sign * row[j];
        if (r < m1) t.a[r][n + r] = sign;  // slack
        t.a[r][n + m1 + r] = 1.0;          // artificial
        t.rhs(r) = sign * b;
        t.basis[r] = n + m1 + r;
    }

    // phase 1: maximize -(sum of artificials); reduced costs from the
    // all-artificial basis are the column sums
    for (int j = 0; j <= t.n_total; ++j) {
        double s = 0.0;
        for (int r = 0; r < m; ++r) s += t.a[r][j];
        t.a[m][j] = s;
    }
    for (int r = 0; r < m; ++r) t.a[m][n + m1 + r] = 0.0;

    // artificial columns may leave the basis but never re-enter
    std::vector<bool> allowed(t.n_total, false);
    for (int j = 0; j < n + m1; ++j) allowed[j] = true;
    bool unbounded = false;
    while (t.iterate(allowed, &unbounded)) {
    }
    if (t.rhs(m) > 1e-7) return {LpResult::Status::Infeasible, {}, 0.0};

    // drive remaining artificials out of the basis where possible
    for (int r = 0; r < m; ++r) {
        if (t.basis[r] < n + m1) continue;
        int col = -1;
        for (int j = 0; j < n + m1; ++j)
            if (std::abs(t.a[r][j]) > kEps) {
                col = j;
                break;
            }
        if (col >= 0) t.pivot(r, col);
        // else: redundant row; its artificial stays basic at value ~0
    }

    // phase 2 objective row: c reduced by the current basis
    for (int j = 0; j <= t.n_total; ++j) t.a[m][j] = 0.0;
    for (int j = 0; j < n; ++j) t.a[m][j] = c[j];
    for (int r = 0; r < m; ++r) {
        const int b = t.basis[r];
        if (b < n && c[b] != 0.0) {
            const double f = c[b];
            for (int j = 0; j <= t.n_total; ++j) t.a[m][j] -= f * t.a[r][j];
        }
    }

    unbounded = false;
    while (t.iterate(allowed, &unbounded)) {
    }
    if (unbounded) return {LpResult::Status::Unbounded, {}, 0.0};

    LpResult res;
    res.status = LpResult::Status::Optimal;
    res.x.assign(n, 0.0);
    for (int r = 0; r < m; ++r)
        if (t.basis[r] < n) res.x[t.basis[r]] = t.rhs(r);
    res.objective = 0.0;
    for (int j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
    return res;
}

}  // namespace qpec
