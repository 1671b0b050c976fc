#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpec/channel.hpp"
#include "qpec/decoder.hpp"
#include "qpec/design.hpp"
#include "qpec/simulate.hpp"
#include "qpec/subset_de.hpp"

namespace {

using namespace qpec;

int env_threads() {
    const char* v = std::getenv("QPEC_THREADS");
    return v ? std::atoi(v) : 0;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::invalid_argument("cannot open output file: " + path);
    return file;
}

void csv_header(std::ostream& os, const std::string& cmd, const std::string& config) {
    os << "# qpec-csv v1\n";
    os << "# cmd=" << cmd << " " << config << "\n";
}

PmModel model_arg(const std::string& name) {
    const auto m = parse_pm_model(name);
    if (!m) throw std::invalid_argument("unknown model: " + name);
    return *m;
}

int run_capacity(uint32_t q, uint32_t M, double eps, bool per_bit) {
    const Field f = Field::make(q);
    const QpecParams params(f, M, eps);
    const double c = capacity(params);
    const double h = conditional_entropy(params);
    const double scale = per_bit ? std::log2(static_cast<double>(q)) : 1.0;
    const char* unit = per_bit ? "bits/use" : "q-ary symbols/use";
    std::cout << "# qpec capacity q=" << q << " M=" << M << " eps=" << eps << "\n";
    std::cout << "C = " << std::setprecision(10) << c * scale << " " << unit << "\n";
    std::cout << "H(Y|X) = " << h * scale << " " << unit << "\n";
    return 0;
}

int run_simulate(const std::string& dd_path, uint32_t q, uint32_t M, std::vector<double> eps_list,
                 uint32_t n, uint64_t trials, uint32_t max_iters, uint64_t seed,
                 const std::string& out_path) {
    const DegreeDistribution dd = DegreeDistribution::load(dd_path);
    std::ofstream file;
    std::ostream& os = open_out(file, out_path);
    std::ostringstream cfg;
    cfg << "dd=" << dd_path << " q=" << q << " M=" << M << " n=" << n << " trials=" << trials
        << " max-iters=" << max_iters << " seed=" << seed << " threads=" << env_threads();
    csv_header(os, "simulate", cfg.str());
    os << "eps,n,trials,symbol_failure_rate,word_failure_rate,mean_iters,vtc_word_failure_rate\n";
    for (double eps : eps_list) {
        SimConfig sim;
        sim.q = q;
        sim.M = M;
        sim.epsilon = eps;
        sim.n = n;
        sim.trials = trials;
        sim.max_iters = max_iters;
        sim.seed = seed;
        sim.threads = env_threads();
        const SimResult r = simulate_ensemble(dd, sim);
        if (r.wrong_symbol_events != 0)
            throw std::runtime_error("decoder resolved a symbol incorrectly");
        os << std::setprecision(10) << eps << "," << n << "," << trials << ","
           << r.symbol_failure_rate(n) << "," << r.word_failure_rate() << "," << r.mean_iters()
           << ","
           << static_cast<double>(r.vtc_word_failures) / static_cast<double>(trials) << "\n";
    }
    return 0;
}

int run_threshold(const std::string& dd_path, uint32_t q, uint32_t M, const std::string& model,
                  double tol, const std::string& engine) {
    const DegreeDistribution dd = DegreeDistribution::load(dd_path);
    ThresholdResult thr;
    if (engine == "subset") {
        const Field f = Field::make(q);
        thr = subset_decoding_threshold(dd, f, M, tol);
    } else {
        thr = decoding_threshold(dd, q, M, model_arg(model), tol);
    }
    std::cout << "# qpec threshold dd=" << dd_path << " q=" << q << " M=" << M
              << " model=" << model << " engine=" << engine << " tol=" << tol << "\n";
    std::cout << std::setprecision(10) << "eps_th in [" << thr.lower << ", " << thr.upper
              << "], midpoint " << thr.midpoint() << "\n";
    return 0;
}

int run_de_trace(const std::string& dd_path, uint32_t q, uint32_t M, const std::string& model,
                 double eps, int max_iters, const std::string& out_path,
                 const std::string& engine) {
    const DegreeDistribution dd = DegreeDistribution::load(dd_path);
    std::ofstream file;
    std::ostream& os = open_out(file, out_path);
    std::ostringstream cfg;
    cfg << "dd=" << dd_path << " q=" << q << " M=" << M << " model=" << model << " eps=" << eps
        << " max-iters=" << max_iters << " engine=" << engine;
    csv_header(os, "de-trace", cfg.str());
    os << "l";
    for (uint32_t m = 1; m <= q; ++m) os << ",Z_" << m;
    os << ",p_e\n";
    DeOptions opts;
    opts.max_iters = max_iters;
    opts.record_distributions = true;
    auto emit = [&](int l, const CardinalityPmf& z, double pe) {
        os << l;
        for (uint32_t m = 1; m <= q; ++m) os << "," << std::setprecision(12) << z[m];
        os << "," << pe << "\n";
    };
    if (engine == "subset") {
        const Field f = Field::make(q);
        const SubsetDe de(dd, f, M);
        const auto trace = de.run(eps, opts);
        for (size_t l = 0; l < trace.z.size(); ++l)
            emit(static_cast<int>(l), de.cardinality_marginal(trace.z[l]), trace.pe[l]);
    } else {
        const CardinalityDe de(dd, q, M, model_arg(model));
        const auto trace = de.run(eps, opts);
        for (size_t l = 0; l < trace.z.size(); ++l)
            emit(static_cast<int>(l), trace.z[l], trace.pe[l]);
    }
    return 0;
}

std::vector<int> parse_cards(const std::string& text) {
    std::vector<int> cards;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) cards.push_back(std::stoi(item));
    if (cards.empty()) throw std::invalid_argument("empty cardinality list");
    return cards;
}

int run_pm_table(uint32_t q, int M, const std::string& cards_text, const std::string& model) {
    const auto cards = parse_cards(cards_text);
    for (int c : cards) {
        if (c < 1 || c > static_cast<int>(q))
            throw std::invalid_argument("cardinalities must lie in [1, q]");
        if (M > 0 && c > M)
            throw std::invalid_argument("incoming VTC cardinalities cannot exceed M");
    }
    const Field f = Field::make(q);
    const auto b = sumset_bounds(cards, static_cast<int>(q), static_cast<int>(f.p()));
    std::cout << "# qpec pm-table q=" << q << " cards=" << cards_text << " model=" << model
              << " B_L=" << b.lower << " B_U=" << b.upper
              << " q_condition=" << (b.q_condition ? "yes" : "no") << "\n";
    std::cout << "m";
    std::vector<PmModel> models;
    if (model == "all") {
        models = {PmModel::LowerBound, PmModel::UpperBound, PmModel::Balls, PmModel::Union};
        if (q <= 5) models.push_back(PmModel::Exact);
    } else {
        models = {model_arg(model)};
    }
    for (const auto m : models) std::cout << ",P_" << to_string(m);
    std::cout << "\n";
    std::vector<CardinalityPmf> tables;
    for (const auto m : models) tables.push_back(p_m(m, cards, f));
    for (uint32_t m = 1; m <= q; ++m) {
        std::cout << m;
        for (const auto& t : tables) std::cout << "," << std::setprecision(10) << t[m];
        std::cout << "\n";
    }
    return 0;
}

int run_qm_table(uint32_t q, uint32_t M, const std::string& cards_text) {
    const auto cards = parse_cards(cards_text);
    for (int c : cards)
        if (c < 1 || c > static_cast<int>(q))
            throw std::invalid_argument("cardinalities must lie in [1, q]");
    const auto qm = q_m(cards, static_cast<int>(M), static_cast<int>(q));
    std::cout << "# qpec qm-table q=" << q << " M=" << M << " cards=" << cards_text << "\n";
    std::cout << "m,Q_m\n";
    for (uint32_t m = 1; m <= q; ++m)
        std::cout << m << "," << std::setprecision(12) << qm[m] << "\n";
    return 0;
}

// design input: "rho" required, "lambda" optional (initial point, needed by
// the union mode)
DegreeDistribution load_design_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open rho file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto j = nlohmann::json::parse(ss.str());
    if (!j.contains("lambda")) j["lambda"] = {{"2", 1.0}};
    return DegreeDistribution::from_json_text(j.dump());
}

int run_design(const std::string& mode, const std::string& rho_path, int d_v, uint32_t q,
               uint32_t M, double target, const std::string& model, double p_tar, double delta,
               double eps, int rounds, const std::string& out_path,
               const std::string& log_path) {
    const DegreeDistribution base = load_design_input(rho_path);
    std::ofstream log_file;
    std::ostream* log = nullptr;
    if (!log_path.empty()) {
        log_file.open(log_path);
        if (!log_file) throw std::invalid_argument("cannot open log file: " + log_path);
        log = &log_file;
    }
    std::map<int, double> lambda;
    if (mode == "qpec-star" || mode == "bec") {
        const DesignMode dm = mode == "qpec-star" ? DesignMode::QpecStar : DesignMode::Bec;
        const DesignResult res =
            design_iterate(target, base.rho(), d_v, q, M, model_arg(model), dm);
        lambda = res.lambda;
        if (log) {
            for (const auto& s : res.trajectory) {
                nlohmann::json j{{"knob", s.knob}, {"achieved", s.achieved}, {"rate", s.rate}};
                *log << j.dump() << "\n";
            }
        }
        std::cout << "# design mode=" << mode << " knob=" << res.knob
                  << " achieved=" << res.achieved << " rate=" << res.rate << "\n";
    } else if (mode == "union") {
        const UnionLpDesignResult res =
            union_lp_design(base, q, M, p_tar, delta, rounds, eps, d_v);
        lambda = res.lambda;
        if (log) {
            for (size_t r = 0; r < res.g_per_round.size(); ++r) {
                nlohmann::json j{{"round", r},
                                 {"g", res.g_per_round[r]},
                                 {"horizon", res.horizon_per_round[r]}};
                *log << j.dump() << "\n";
            }
        }
        std::cout << "# design mode=union rounds=" << res.rounds
                  << " operating_eps=" << res.operating_eps << "\n";
    } else {
        throw std::invalid_argument("unknown design mode: " + mode);
    }
    const DegreeDistribution result(lambda, base.rho());
    std::cout << result.to_json_text() << "\n";
    std::cout << "# design_rate=" << result.design_rate() << "\n";
    if (!out_path.empty()) result.save(out_path);
    return 0;
}

int run_reproduce(const std::string& recipe) {
    if (recipe == "thr-429") {
        // regular (3,6), full-erasure case: every model collapses to the
        // one-dimensional erasure recursion with threshold 0.429
        const auto dd = DegreeDistribution::regular(3, 6);
        std::cout << "# reproduce thr-429: (3,6) ensemble, M=q=4, tol=1e-4\n";
        for (const char* model : {"min", "max", "balls", "union", "exact"}) {
            const auto thr = decoding_threshold(dd, 4, 4, *parse_pm_model(model), 1e-4);
            std::cout << model << " threshold midpoint " << std::setprecision(6)
                      << thr.midpoint() << " (bracket width " << thr.upper - thr.lower << ")\n";
        }
        return 0;
    }
    if (recipe == "fig5-q4") {
        const auto dd = DegreeDistribution::regular(3, 6);
        std::cout << "# reproduce fig5-q4: (3,6) thresholds over M, q=4, tol=1e-3\n";
        std::cout << "M,min,max,balls,union,exact,subset_exact\n";
        const Field f = Field::make(4);
        for (uint32_t M = 2; M <= 4; ++M) {
            std::cout << M;
            for (const char* model : {"min", "max", "balls", "union", "exact"}) {
                const auto thr = decoding_threshold(dd, 4, M, *parse_pm_model(model), 1e-3);
                std::cout << "," << std::setprecision(6) << thr.midpoint();
            }
            const auto sub = subset_decoding_threshold(dd, f, M, 1e-3);
            std::cout << "," << sub.midpoint() << "\n";
        }
        return 0;
    }
    if (recipe == "table1") {
        // rate-maximizing LP pairs for rho = x^5, d_v = 5, at the pinned knobs
        struct Row {
            uint32_t q, M;
            double eps_star, bec_th;
        };
        const std::vector<Row> rows = {{3, 2, 0.718, 0.391}, {4, 3, 0.778, 0.532},
                                       {5, 3, 0.751, 0.464}, {7, 4, 0.763, 0.492},
                                       {8, 5, 0.749, 0.480}, {16, 9, 0.754, 0.487}};
        const std::map<int, double> rho{{6, 1.0}};
        std::cout << "# reproduce table1: rho=x^5, d_v=5\n";
        std::cout << "q,M,kind,knob,lambda,rate\n";
        auto lam_str = [](const std::map<int, double>& lam) {
            std::ostringstream ss;
            bool first = true;
            for (const auto& [i, c] : lam) {
                if (!first) ss << " + ";
                ss << std::setprecision(4) << c << "*x^" << (i - 1);
                first = false;
            }
            return ss.str();
        };
        for (const auto& row : rows) {
            const auto star = qpec_star_lp(rho, row.eps_star, 5);
            std::cout << row.q << "," << row.M << ",qpec-star," << row.eps_star << ","
                      << lam_str(star.lambda) << "," << std::setprecision(4) << star.rate << "\n";
            const auto bec = bec_lp(rho, row.bec_th, 5);
            std::cout << row.q << "," << row.M << ",bec," << row.bec_th << ","
                      << lam_str(bec.lambda) << "," << std::setprecision(4) << bec.rate << "\n";
        }
        return 0;
    }
    throw std::invalid_argument("unknown recipe: " + recipe +
                                " (available: thr-429, fig5-q4, table1)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-ary partial erasure channel toolkit"};
    app.require_subcommand(1);

    uint32_t q = 4, M = 2, n = 512, max_iters = 80;
    double eps = 0.5, tol = 1e-3, target = 0.6, p_tar = 1e-6, delta = 0.05, op_eps = 0.0;
    uint64_t trials = 1000, seed = 1;
    int d_v = 5, rounds = 40, trace_iters = 200;
    std::vector<double> eps_list;
    std::string dd_path, out_path, model = "union", engine = "cardinality", cards = "2,2";
    std::string mode = "qpec-star", log_path, recipe;
    bool per_bit = false;

    auto* cap = app.add_subcommand("capacity", "channel capacity and conditional entropy");
    cap->add_option("--q", q)->required();
    cap->add_option("--M", M)->required();
    cap->add_option("--eps", eps)->required();
    cap->add_flag("--per-bit", per_bit, "print in bits instead of q-ary units");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo decoding over sampled graphs");
    sim->add_option("--dd", dd_path)->required();
    sim->add_option("--q", q)->required();
    sim->add_option("--M", M)->required();
    sim->add_option("--eps", eps_list)->required()->expected(-1);
    sim->add_option("--n", n)->required();
    sim->add_option("--trials", trials);
    sim->add_option("--max-iters", max_iters);
    sim->add_option("--seed", seed);
    sim->add_option("--out", out_path);

    auto* thr = app.add_subcommand("threshold", "decoding threshold by bisection");
    thr->add_option("--dd", dd_path)->required();
    thr->add_option("--q", q)->required();
    thr->add_option("--M", M)->required();
    thr->add_option("--model", model, "exact|min|max|balls|union");
    thr->add_option("--tol", tol);
    thr->add_option("--engine", engine, "cardinality|subset");

    auto* dtr = app.add_subcommand("de-trace", "density-evolution trace to CSV");
    dtr->add_option("--dd", dd_path)->required();
    dtr->add_option("--q", q)->required();
    dtr->add_option("--M", M)->required();
    dtr->add_option("--model", model);
    dtr->add_option("--eps", eps)->required();
    dtr->add_option("--max-iters", trace_iters);
    dtr->add_option("--out", out_path);
    dtr->add_option("--engine", engine, "cardinality|subset");

    auto* pmt = app.add_subcommand("pm-table", "check-node output-cardinality models");
    pmt->add_option("--q", q)->required();
    pmt->add_option("--M", M);
    pmt->add_option("--cards", cards)->required();
    pmt->add_option("--model", model, "exact|min|max|balls|union|all");

    auto* qmt = app.add_subcommand("qm-table", "variable-node intersection cardinalities");
    qmt->add_option("--q", q)->required();
    qmt->add_option("--M", M)->required();
    qmt->add_option("--cards", cards)->required();

    auto* des = app.add_subcommand("design", "degree-distribution optimization");
    des->add_option("--mode", mode, "qpec-star|bec|union");
    des->add_option("--rho", dd_path, "JSON with rho (and initial lambda for union mode)")
        ->required();
    des->add_option("--dv", d_v);
    des->add_option("--q", q)->required();
    des->add_option("--M", M)->required();
    des->add_option("--target", target, "target threshold (qpec-star/bec modes)");
    des->add_option("--model", model, "threshold model for the outer loop");
    des->add_option("--p-tar", p_tar);
    des->add_option("--delta", delta);
    des->add_option("--eps", op_eps, "operating point for union mode (0 = auto)");
    des->add_option("--rounds", rounds);
    des->add_option("--out", out_path);
    des->add_option("--log", log_path, "JSON-lines outer-loop log");

    auto* rep = app.add_subcommand("reproduce", "named desk-scale recipes");
    rep->add_option("recipe", recipe, "thr-429 | fig5-q4 | table1")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cap->parsed()) return run_capacity(q, M, eps, per_bit);
        if (sim->parsed())
            return run_simulate(dd_path, q, M, eps_list, n, trials, max_iters, seed, out_path);
        if (thr->parsed()) return run_threshold(dd_path, q, M, model, tol, engine);
        if (dtr->parsed())
            return run_de_trace(dd_path, q, M, model, eps, trace_iters, out_path, engine);
        if (pmt->parsed())
            return run_pm_table(q, pmt->count("--M") ? static_cast<int>(M) : -1, cards, model);
        if (qmt->parsed()) return run_qm_table(q, M, cards);
        if (des->parsed())
            return run_design(mode, dd_path, d_v, q, M, target, model, p_tar, delta, op_eps,
                              rounds, out_path, log_path);
        if (rep->parsed()) return run_reproduce(recipe);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
