#include "qpec/design.hpp"

#include <algorithm>
#include <cmath>

#include "qpec/simplex.hpp"

namespace qpec {

namespace {

double lambda_arg_qpec(const DegreeDistribution& dd, double x) {
    return 1.0 - dd.rho_at(1.0 - x) - x * dd.rho_deriv(1.0 - x);
}

std::map<int, double> clean_lambda(const std::vector<double>& x, int d_v) {
    std::map<int, double> lam;
    double sum = 0.0;
    for (int i = 2; i <= d_v; ++i) {
        const double v = x[i - 2];
        if (v > 1e-12) {
            lam[i] = v;
            sum += v;
        }
    }
    for (auto& [deg, v] : lam) v /= sum;
    return lam;
}

double rate_of(const std::map<int, double>& lambda, const std::map<int, double>& rho) {
    double lam_int = 0.0, rho_int = 0.0;
    for (const auto& [i, c] : lambda) lam_int += c / i;
    for (const auto& [i, c] : rho) rho_int += c / i;
    return 1.0 - rho_int / lam_int;
}

// shared LP body for the two recursions; arg(x) is the lambda argument
LpDesign recursion_lp(const std::map<int, double>& rho, double eps, int d_v, int grid_n,
                      bool qpec_kind) {
    if (grid_n < 50) throw std::invalid_argument("grid_n must be at least 50");
    if (d_v < 2) throw std::invalid_argument("d_v must be at least 2");
    const DegreeDistribution probe({{2, 1.0}}, rho);
    auto arg = [&](double x) {
        return qpec_kind ? lambda_arg_qpec(probe, x) : 1.0 - probe.rho_at(1.0 - x);
    };

    const int n = d_v - 1;  // lambda_2 .. lambda_{d_v}
    std::vector<double> c(n);
    for (int i = 2; i <= d_v; ++i) c[i - 2] = 1.0 / i;

    // sampled semi-infinite constraints plus cutting planes from the
    // fine-grid re-check; if cuts alone cannot close the gap, tighten eps
    std::vector<double> cuts;
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<std::vector<double>> a_ub;
        std::vector<double> b_ub;
        auto add_point = [&](double x) {
            const double y = arg(x);
            std::vector<double> row(n);
            for (int i = 2; i <= d_v; ++i) row[i - 2] = eps * std::pow(y, i - 1);
            a_ub.push_back(std::move(row));
            b_ub.push_back(x);
        };
        for (int j = 1; j <= grid_n; ++j) add_point(static_cast<double>(j) / grid_n);
        for (double x : cuts) add_point(x);
        const auto res = solve_lp(c, a_ub, b_ub, {std::vector<double>(n, 1.0)}, {1.0});
        if (res.status != LpResult::Status::Optimal) {
            // find a grid point no vertex of the simplex can satisfy
            for (int j = 1; j <= grid_n; ++j) {
                const double x = static_cast<double>(j) / grid_n;
                double best = 1e300;
                for (int i = 2; i <= d_v; ++i)
                    best = std::min(best, eps * std::pow(arg(x), i - 1));
                if (best > x)
                    throw Infeasible("no variable distribution satisfies the recursion at x = " +
                                     std::to_string(x));
            }
            throw Infeasible("recursion LP infeasible");
        }
        // re-verify on a 10x finer grid
        const DegreeDistribution cand(clean_lambda(res.x, d_v), rho);
        bool ok = true;
        for (int j = 1; j <= 10 * grid_n; ++j) {
            const double x = static_cast<double>(j) / (10 * grid_n);
            const double h = qpec_kind ? h_eps(cand, eps, x) : f_eps(cand, eps, x);
            if (h - x > 1e-9) {
                ok = false;
                if (std::find(cuts.begin(), cuts.end(), x) == cuts.end()) cuts.push_back(x);
            }
        }
        if (ok) {
            LpDesign out;
            out.lambda = clean_lambda(res.x, d_v);
            out.objective = res.objective;
            out.rate = rate_of(out.lambda, rho);
            out.eps_effective = eps;
            return out;
        }
        if (cuts.size() > 80) {
            cuts.clear();
            eps *= 0.999;
        }
    }
    throw Infeasible("could not satisfy the fine-grid re-check");
}

}  // namespace

double h_eps(const DegreeDistribution& dd, double eps, double x) {
    return eps * dd.lambda_at(lambda_arg_qpec(dd, x));
}

double g_of(const DegreeDistribution& dd, double x) {
    return dd.rho_at(1.0 - x) + x * dd.rho_deriv(1.0 - x);
}

double f_eps(const DegreeDistribution& dd, double eps, double x) {
    return eps * dd.lambda_at(1.0 - dd.rho_at(1.0 - x));
}

double epsilon_star(const DegreeDistribution& dd, double tol) {
    if (tol < 1e-10) throw std::invalid_argument("tol too small");
    const int grid = 4096;
    auto has_no_fixed_point = [&](double eps) {
        double min_gap = 1e300;
        double argmin = 1.0;
        for (int j = 1; j <= grid; ++j) {
            const double x = static_cast<double>(j) / grid;
            const double gap = x - h_eps(dd, eps, x);
            if (gap <= 0.0) return false;
            if (gap < min_gap) {
                min_gap = gap;
                argmin = x;
            }
        }
        // golden-section refinement around the tightest grid point
        double lo = std::max(1e-9, argmin - 1.5 / grid), hi = std::min(1.0, argmin + 1.5 / grid);
        for (int it = 0; it < 80; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (m1 - h_eps(dd, eps, m1) < m2 - h_eps(dd, eps, m2))
                hi = m2;
            else
                lo = m1;
        }
        return (lo - h_eps(dd, eps, lo)) > 0.0;
    };
    double lo = 0.0, hi = 1.0;
    if (has_no_fixed_point(1.0)) return 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (has_no_fixed_point(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

LpDesign qpec_star_lp(const std::map<int, double>& rho, double eps_star, int d_v, int grid_n) {
    return recursion_lp(rho, eps_star, d_v, grid_n, true);
}

LpDesign bec_lp(const std::map<int, double>& rho, double eps_th, int d_v, int grid_n) {
    return recursion_lp(rho, eps_th, d_v, grid_n, false);
}

DesignResult design_iterate(double target_eth, const std::map<int, double>& rho, int d_v,
                            uint32_t q, uint32_t M, PmModel model, DesignMode mode,
                            double tol_target, int max_outer) {
    DesignResult out;
    // measured threshold is increasing in the knob; an infeasible LP means
    // the knob is beyond any achievable recursion threshold
    auto measure = [&](double knob) -> DesignStep {
        try {
            const LpDesign lp = mode == DesignMode::QpecStar ? qpec_star_lp(rho, knob, d_v)
                                                             : bec_lp(rho, knob, d_v);
            const DegreeDistribution dd(lp.lambda, rho);
            const auto thr = decoding_threshold(dd, q, M, model, 2e-4);
            DesignStep s{knob, thr.midpoint(), lp.rate};
            out.trajectory.push_back(s);
            return s;
        } catch (const Infeasible&) {
            return {knob, 2.0, 0.0};  // sentinel: knob too large
        }
    };

    // bracket the target
    double k_lo = 0.02, k_hi = 0.0;
    DesignStep s_lo = measure(k_lo);
    if (std::abs(s_lo.achieved - target_eth) <= tol_target) {
        k_hi = k_lo;
    } else {
        if (s_lo.achieved > target_eth)
            throw BracketFailure("target threshold below the designable range");
        double k = std::clamp(target_eth + (mode == DesignMode::QpecStar ? 0.10 : -0.15),
                              0.05, 0.95);
        DesignStep s = measure(k);
        int expand = 0;
        while (s.achieved < target_eth && std::abs(s.achieved - target_eth) > tol_target) {
            s_lo = s;
            k_lo = k;
            k = std::min(0.999, k + 0.1);
            s = measure(k);
            if (++expand > 12) throw BracketFailure("could not bracket the target threshold");
        }
        k_hi = k;
        // safeguarded secant within [k_lo, k_hi]
        DesignStep s_hi = s;
        DesignStep best = s_hi.achieved < 1.5 ? s_hi : s_lo;
        for (int it = 0; it < max_outer; ++it) {
            if (std::abs(best.achieved - target_eth) <= tol_target) break;
            double k2 = 0.5 * (k_lo + k_hi);
            if (s_hi.achieved < 1.5 && std::abs(s_hi.achieved - s_lo.achieved) > 1e-12) {
                const double secant =
                    s_hi.knob + (target_eth - s_hi.achieved) * (s_hi.knob - s_lo.knob) /
                                    (s_hi.achieved - s_lo.achieved);
                if (secant > k_lo + 1e-6 && secant < k_hi - 1e-6) k2 = secant;
            }
            const DesignStep s2 = measure(k2);
            if (s2.achieved < 1.5 &&
                std::abs(s2.achieved - target_eth) < std::abs(best.achieved - target_eth))
                best = s2;
            if (s2.achieved < target_eth) {
                k_lo = k2;
                s_lo = s2;
            } else {
                k_hi = k2;
                if (s2.achieved < 1.5) s_hi = s2;
            }
            if (k_hi - k_lo < 1e-6) break;
        }
        if (std::abs(best.achieved - target_eth) > tol_target)
            throw BracketFailure("design_iterate did not reach the target threshold");
        k_hi = best.knob;
    }
    const double knob = k_hi;
    const LpDesign lp =
        mode == DesignMode::QpecStar ? qpec_star_lp(rho, knob, d_v) : bec_lp(rho, knob, d_v);
    const DegreeDistribution dd(lp.lambda, rho);
    out.lambda = lp.lambda;
    out.knob = knob;
    out.achieved = decoding_threshold(dd, q, M, model, 2e-4).midpoint();
    out.rate = lp.rate;
    return out;
}

UnionLpStep union_lp_step(const DegreeDistribution& dd, uint32_t q, uint32_t M, double eps,
                          double p_tar, double delta, int d_v) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
    if (dd.max_var_degree() > d_v)
        throw std::invalid_argument("current lambda has degrees above d_v");
    const CardinalityDe de(dd, q, M, PmModel::Union);
    DeOptions opts;
    opts.pe_target = p_tar;
    opts.max_iters = 5000;
    opts.record_distributions = true;
    const DeTrace trace = de.run(eps, opts);
    if (!trace.converged)
        throw NoHorizon("union-model DE does not reach p_tar at this operating point");
    const int horizon = trace.iterations;

    const int n = d_v - 1;
    // A[l][i]: failure probability at iteration l when iteration l uses all
    // edge mass on degree i and the base pair ran before it
    std::vector<std::vector<double>> a_mat(horizon + 1, std::vector<double>(n, 0.0));
    for (int l = 1; l <= horizon; ++l)
        for (int i = 2; i <= d_v; ++i) {
            const CardinalityPmf zi = de.variable_update_single_degree(trace.w[l - 1], i, eps);
            a_mat[l][i - 2] = 1.0 - zi[1];
        }
    double identity_error = 0.0;
    for (int l = 1; l <= horizon; ++l) {
        double combo = 0.0;
        for (const auto& [i, coeff] : dd.lambda()) combo += coeff * a_mat[l][i - 2];
        identity_error = std::max(identity_error, std::abs(combo - trace.pe[l]));
    }

    // objective: minimize sum_l (p~_l - p_l) / (p_{l-1} - p_l); constant part
    // dropped, so maximize the negated coefficient vector
    std::vector<double> c(n, 0.0);
    std::vector<std::vector<double>> a_ub;
    std::vector<double> b_ub;
    for (int l = 1; l <= horizon; ++l) {
        const double drop = trace.pe[l - 1] - trace.pe[l];
        if (drop <= 0.0) continue;  // converged traces decrease strictly
        for (int i = 0; i < n; ++i) c[i] -= a_mat[l][i] / drop;
        a_ub.push_back(a_mat[l]);
        b_ub.push_back(trace.pe[l - 1]);  // p~_l <= p_{l-1}
        a_ub.push_back(a_mat[l]);
        b_ub.push_back(trace.pe[l] + delta * drop);  // trust region, upper
        std::vector<double> neg(n);
        for (int i = 0; i < n; ++i) neg[i] = -a_mat[l][i];
        a_ub.push_back(std::move(neg));
        b_ub.push_back(-(trace.pe[l] - delta * drop));  // trust region, lower
    }
    // normalization and rate preservation (fixed edge-rate sum lambda_i / i)
    std::vector<double> ones(n, 1.0), inv_deg(n);
    for (int i = 2; i <= d_v; ++i) inv_deg[i - 2] = 1.0 / i;
    double edge_rate = 0.0;
    for (const auto& [i, coeff] : dd.lambda()) edge_rate += coeff / i;
    const auto res = solve_lp(c, a_ub, b_ub, {ones, inv_deg}, {1.0, edge_rate});
    if (res.status != LpResult::Status::Optimal)
        throw Infeasible("union perturbation LP infeasible");

    UnionLpStep out;
    out.lambda = clean_lambda(res.x, d_v);
    out.horizon = horizon;
    out.identity_error = identity_error;
    // G at the optimum: add back the constant part sum_l -p_l / drop
    double g = -res.objective;
    for (int l = 1; l <= horizon; ++l) {
        const double drop = trace.pe[l - 1] - trace.pe[l];
        if (drop > 0.0) g -= trace.pe[l] / drop;
    }
    out.g_value = g;
    return out;
}

UnionLpDesignResult union_lp_design(const DegreeDistribution& initial, uint32_t q, uint32_t M,
                                    double p_tar, double delta, int max_rounds, double eps,
                                    int d_v, double g_tol) {
    UnionLpDesignResult out;
    std::map<int, double> lambda = initial.lambda();
    if (eps <= 0.0) {
        const auto thr = decoding_threshold(initial, q, M, PmModel::Union, 1e-3);
        eps = 0.98 * thr.midpoint();
    }
    out.operating_eps = eps;
    for (int round = 0; round < max_rounds; ++round) {
        const DegreeDistribution cur(lambda, initial.rho());
        const UnionLpStep step = union_lp_step(cur, q, M, eps, p_tar, delta, d_v);
        out.g_per_round.push_back(step.g_value);
        out.horizon_per_round.push_back(step.horizon);
        out.rounds = round + 1;
        // converged when the linearized improvement is negligible; the
        // current pair is the fixpoint, so keep it
        if (step.g_value >= -g_tol) break;
        double l1 = 0.0;
        for (int i = 2; i <= d_v; ++i) {
            const double a = lambda.count(i) ? lambda.at(i) : 0.0;
            const double b = step.lambda.count(i) ? step.lambda.at(i) : 0.0;
            l1 += std::abs(a - b);
        }
        lambda = step.lambda;
        if (l1 < 1e-4) break;
    }
    out.lambda = lambda;
    return out;
}

}  // namespace qpec
