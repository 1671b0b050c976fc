#include "qpec/degree_dist.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qpec {

namespace {

void validate_family(const std::map<int, double>& coeffs, const char* name) {
    if (coeffs.empty())
        throw std::invalid_argument(std::string(name) + " must have at least one degree");
    double sum = 0.0;
    for (const auto& [deg, c] : coeffs) {
        if (deg < 2)
            throw std::invalid_argument(std::string(name) + " degrees must be >= 2");
        if (c < 0)
            throw std::invalid_argument(std::string(name) + " coefficients must be >= 0");
        sum += c;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(name) + " coefficients must sum to 1");
}

std::map<int, double> strip_zeros(std::map<int, double> m) {
    for (auto it = m.begin(); it != m.end();)
        it = (it->second == 0.0 && m.size() > 1) ? m.erase(it) : std::next(it);
    return m;
}

}  // namespace

DegreeDistribution::DegreeDistribution(std::map<int, double> lambda, std::map<int, double> rho)
    : lambda_(strip_zeros(std::move(lambda))), rho_(strip_zeros(std::move(rho))) {
    validate_family(lambda_, "lambda");
    validate_family(rho_, "rho");
}

DegreeDistribution DegreeDistribution::regular(int d_v, int d_c) {
    return DegreeDistribution({{d_v, 1.0}}, {{d_c, 1.0}});
}

DegreeDistribution DegreeDistribution::from_json_text(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::map<int, double> lam, rho;
    for (const auto& [key, val] : j.at("lambda").items()) lam[std::stoi(key)] = val.get<double>();
    for (const auto& [key, val] : j.at("rho").items()) rho[std::stoi(key)] = val.get<double>();
    return DegreeDistribution(std::move(lam), std::move(rho));
}

DegreeDistribution DegreeDistribution::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open degree-distribution file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string DegreeDistribution::to_json_text() const {
    nlohmann::json j;
    for (const auto& [deg, c] : lambda_) j["lambda"][std::to_string(deg)] = c;
    for (const auto& [deg, c] : rho_) j["rho"][std::to_string(deg)] = c;
    return j.dump(2);
}

void DegreeDistribution::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write degree-distribution file: " + path);
    out << to_json_text() << "\n";
}

double DegreeDistribution::lambda_at(double x) const {
    double v = 0.0;
    for (const auto& [i, c] : lambda_) v += c * std::pow(x, i - 1);
    return v;
}

double DegreeDistribution::rho_at(double x) const {
    double v = 0.0;
    for (const auto& [i, c] : rho_) v += c * std::pow(x, i - 1);
    return v;
}

double DegreeDistribution::rho_deriv(double x) const {
    double v = 0.0;
    for (const auto& [i, c] : rho_)
        if (i >= 2) v += c * (i - 1) * std::pow(x, i - 2);
    return v;
}

double DegreeDistribution::rho_second_deriv(double x) const {
    double v = 0.0;
    for (const auto& [i, c] : rho_)
        if (i >= 3) v += c * (i - 1) * (i - 2) * std::pow(x, i - 3);
    return v;
}

double DegreeDistribution::design_rate() const {
    double lam_int = 0.0, rho_int = 0.0;
    for (const auto& [i, c] : lambda_) lam_int += c / i;
    for (const auto& [i, c] : rho_) rho_int += c / i;
    return 1.0 - rho_int / lam_int;
}

}  // namespace qpec
