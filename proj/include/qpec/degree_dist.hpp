#pragma once

#include <map>
#include <string>
#include <vector>

namespace qpec {

/// Edge-perspective degree-distribution pair: lambda(x) = sum_i lambda_i
/// x^(i-1) over variable degrees i in [2, d_v], rho(x) likewise for checks.
/// Coefficients are fractions of edges, each family sums to 1.
class DegreeDistribution {
  public:
    DegreeDistribution(std::map<int, double> lambda, std::map<int, double> rho);

    static DegreeDistribution regular(int d_v, int d_c);

    /// {"lambda": {"2": 0.644, "5": 0.356}, "rho": {"6": 1.0}},
    /// keys are node degrees i (coefficient of x^(i-1)).
    static DegreeDistribution from_json_text(const std::string& text);
    static DegreeDistribution load(const std::string& path);
    std::string to_json_text() const;
    void save(const std::string& path) const;

    const std::map<int, double>& lambda() const { return lambda_; }
    const std::map<int, double>& rho() const { return rho_; }
    int max_var_degree() const { return lambda_.rbegin()->first; }
    int max_check_degree() const { return rho_.rbegin()->first; }

    double lambda_at(double x) const;
    double rho_at(double x) const;
    double rho_deriv(double x) const;
    double rho_second_deriv(double x) const;

    /// 1 - (sum rho_i / i) / (sum lambda_i / i)
    double design_rate() const;

  private:
    std::map<int, double> lambda_, rho_;
};

}  // namespace qpec
