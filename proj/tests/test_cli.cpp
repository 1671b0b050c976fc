#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CliRun {
    int exit_code;
    std::string out;
};

CliRun run_cli(const std::string& args) {
    const std::string tmp = "cli_test_out.txt";
    const std::string cmd = std::string(QPEC_CLI_PATH) + " " + args + " > " + tmp + " 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    std::remove(tmp.c_str());
    return {WEXITSTATUS(rc), ss.str()};
}

std::string write_dd36() {
    const std::string path = "cli_test_dd36.json";
    std::ofstream out(path);
    out << R"({"lambda": {"3": 1.0}, "rho": {"6": 1.0}})";
    return path;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

double value_after(const std::string& text, const std::string& key) {
    const auto pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    return std::atof(text.c_str() + pos + key.size());
}

}  // namespace

TEST_CASE("capacity subcommand") {
    const auto r = run_cli("capacity --q 8 --M 4 --eps 0.59");
    CHECK(r.exit_code == 0);
    // 1 - 0.59 * log_8(4) = 1 - 0.59 * 2/3
    CHECK(value_after(r.out, "C = ") == doctest::Approx(1.0 - 0.59 * 2.0 / 3).epsilon(1e-6));
    CHECK(contains(r.out, "H(Y|X)"));

    const auto bits = run_cli("capacity --q 8 --M 4 --eps 0.59 --per-bit");
    CHECK(value_after(bits.out, "C = ") ==
          doctest::Approx(3.0 * (1.0 - 0.59 * 2.0 / 3)).epsilon(1e-6));
}

TEST_CASE("validation failures exit with code 2") {
    CHECK(run_cli("capacity --q 6 --M 2 --eps 0.5").exit_code == 2);
    CHECK(run_cli("capacity --q 8 --M 9 --eps 0.5").exit_code == 2);
    CHECK(run_cli("capacity --q 8 --M 4 --eps 1.5").exit_code == 2);
    CHECK(run_cli("reproduce no-such-recipe").exit_code == 2);
}

TEST_CASE("threshold subcommand finds the classical value") {
    const std::string dd = write_dd36();
    const auto r = run_cli("threshold --dd " + dd + " --q 4 --M 4 --model balls --tol 1e-4");
    CHECK(r.exit_code == 0);
    CHECK(value_after(r.out, "midpoint ") == doctest::Approx(0.4294).epsilon(2e-3));
    std::remove(dd.c_str());
}

TEST_CASE("simulate: identical seeds give byte-identical CSV") {
    const std::string dd = write_dd36();
    const std::string base =
        "simulate --dd " + dd + " --q 4 --M 2 --eps 0.4 0.6 --n 48 --trials 60 --seed 7";
    const auto a = run_cli(base);
    const auto b = run_cli(base);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(contains(a.out, "# qpec-csv v1"));
    CHECK(contains(a.out, "seed=7"));
    CHECK(contains(a.out, "symbol_failure_rate"));
    // two data rows for the two eps values
    int rows = 0;
    std::stringstream ss(a.out);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#' && line.find("eps") != 0) ++rows;
    CHECK(rows == 2);

    const auto c = run_cli(base + "1");  // different seed
    CHECK(c.out != a.out);
    std::remove(dd.c_str());
}

TEST_CASE("de-trace emits the schema header and q+2 columns") {
    const std::string dd = write_dd36();
    const auto r = run_cli("de-trace --dd " + dd +
                           " --q 4 --M 3 --model union --eps 0.5 --max-iters 12");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "# qpec-csv v1"));
    CHECK(contains(r.out, "l,Z_1,Z_2,Z_3,Z_4,p_e"));
    const auto sub = run_cli("de-trace --dd " + dd +
                             " --q 4 --M 3 --engine subset --eps 0.5 --max-iters 12");
    CHECK(sub.exit_code == 0);
    CHECK(contains(sub.out, "l,Z_1,Z_2,Z_3,Z_4,p_e"));
    std::remove(dd.c_str());
}

TEST_CASE("pm-table and qm-table") {
    const auto pm = run_cli("pm-table --q 4 --cards 2,2 --model all");
    CHECK(pm.exit_code == 0);
    CHECK(contains(pm.out, "B_L=2"));
    CHECK(contains(pm.out, "B_U=4"));
    CHECK(contains(pm.out, "q_condition=no"));
    CHECK(contains(pm.out, "P_exact"));

    const auto qm = run_cli("qm-table --q 4 --M 2 --cards 2,2");
    CHECK(qm.exit_code == 0);
    // Q_1 = 8/9, Q_2 = 1/9
    CHECK(contains(qm.out, "1,0.888888888889"));
    CHECK(contains(qm.out, "2,0.111111111111"));

    CHECK(run_cli("pm-table --q 4 --cards 9,2 --model balls").exit_code == 2);
    CHECK(run_cli("pm-table --q 4 --M 2 --cards 3,2 --model balls").exit_code == 2);
}

TEST_CASE("design subcommand writes a loadable distribution and a log") {
    const std::string rho_file = "cli_test_rho.json";
    {
        std::ofstream out(rho_file);
        out << R"({"lambda": {"3": 1.0}, "rho": {"6": 1.0}})";
    }
    const auto r = run_cli("design --mode bec --rho " + rho_file +
                           " --dv 5 --q 3 --M 2 --target 0.6 --model union"
                           " --out cli_test_lambda.json --log cli_test_log.jsonl");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "achieved=0.6"));
    std::ifstream lam("cli_test_lambda.json");
    CHECK(lam.good());
    std::ifstream log("cli_test_log.jsonl");
    std::string line;
    int log_lines = 0;
    while (std::getline(log, line))
        if (contains(line, "achieved")) ++log_lines;
    CHECK(log_lines >= 1);
    std::remove(rho_file.c_str());
    std::remove("cli_test_lambda.json");
    std::remove("cli_test_log.jsonl");
}

TEST_CASE("reproduce thr-429") {
    const auto r = run_cli("reproduce thr-429");
    CHECK(r.exit_code == 0);
    int hits = 0;
    std::stringstream ss(r.out);
    std::string line;
    while (std::getline(ss, line))
        if (contains(line, "0.4294") || contains(line, "0.4293")) ++hits;
    CHECK(hits == 5);  // every model agrees
}
