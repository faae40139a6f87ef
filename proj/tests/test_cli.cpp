#include "support.hpp"

#include "crnpolar/cli.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace crnpolar;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("crnpolar_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run_cli(const std::string& args, const fs::path& dir)
{
    const auto log = dir / "stdout.txt";
    const std::string cmd = std::string(CRNPOLAR_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

bool contains(const std::string& hay, const std::string& needle)
{
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("compile writes network, node map and counts")
{
    const auto dir = scratch("compile");
    const auto r = run_cli("compile --n 2 --frozen 0,2 --decoder ml --out-dir " + dir.string(), dir);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "reactions 44"));
    for (auto f : {"network.crn", "nodemap.csv", "counts.txt", "counts.json"})
        CHECK(fs::exists(dir / f));
    const auto net = parse_network(slurp(dir / "network.crn"), ParseOptions{true});
    CHECK(net.reaction_count() == 44);
    CHECK(contains(slurp(dir / "counts.json"), "\"reactions\": 44"));
}

TEST_CASE("usage errors exit with 3")
{
    const auto dir = scratch("usage");
    CHECK(run_cli("compile --n 0 --decoder sc --out-dir " + dir.string(), dir).code == 3);
    CHECK(run_cli("compile --n 2 --frozen 0,9 --out-dir " + dir.string(), dir).code == 3);
    CHECK(run_cli("compile --n 2 --decoder bp", dir).code == 3);
    CHECK(run_cli("simulate --n 2 --frozen 0,2 --decoder ml --priors 0.2,0.4,0.1,0.2 --t-end 0 --out-dir " +
                  dir.string(),
              dir)
              .code == 3);
    CHECK(run_cli("verify --n 2 --frozen 0,2 --decoder ml --priors 0.2,0.4 --out-dir " + dir.string(), dir).code ==
          3);
    CHECK(run_cli("frobnicate", dir).code == 3);
}

TEST_CASE("simulate writes a trajectory and readouts")
{
    const auto dir = scratch("simulate");
    const auto r = run_cli("simulate --n 2 --frozen 0,2 --decoder ml --priors 0.2,0.4,0.1,0.2 --t-end 30 --out-dir " +
                           dir.string(),
                       dir);
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "ml.u1"));
    const auto csv = slurp(dir / "trajectory.csv");
    CHECK(csv.rfind("time,", 0) == 0);
    // header plus samples at 0, 0.5, ..., 30
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 62);
}

TEST_CASE("verify passes on the reference case and reports published values")
{
    const auto dir = scratch("verify");
    const auto r = run_cli("verify --n 2 --frozen 0,2 --decoder sc --priors 0.2,0.4,0.1,0.2 --internal", dir);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "RESULT PASS"));
    CHECK(contains(r.out, "0.249"));
    CHECK(contains(r.out, "0.23"));
    CHECK(contains(r.out, "sc.d0.b0.f0"));
    const auto m = run_cli("verify --n 2 --frozen 0,2 --decoder encoder --message 11", dir);
    CHECK(m.code == 0);
}

TEST_CASE("verify round trip through a compiled file detects corruption")
{
    const auto dir = scratch("corrupt");
    REQUIRE(run_cli("compile --n 2 --frozen 0,2 --decoder ml --out-dir " + dir.string(), dir).code == 0);
    const std::string load = "verify --n 2 --frozen 0,2 --decoder ml --priors 0.2,0.4,0.1,0.2 --network " +
                             (dir / "network.crn").string();
    const auto ok = run_cli(load, dir);
    CHECK(ok.code == 0);

    // Drop one marginalization reaction.
    std::istringstream in(slurp(dir / "network.crn"));
    std::ostringstream out;
    bool dropped = false;
    for (std::string line; std::getline(in, line);) {
        if (!dropped && contains(line, "gadget=marginalize")) {
            dropped = true;
            continue;
        }
        out << line << "\n";
    }
    REQUIRE(dropped);
    std::ofstream(dir / "network.crn") << out.str();
    const auto bad = run_cli(load, dir);
    CHECK(bad.code != 0);
    CHECK(bad.code != 3);
    CHECK((contains(bad.out, "RESULT FAIL") || contains(bad.out, "NOT CONVERGED")));
}

TEST_CASE("count-table reports crossover and breakdowns")
{
    const auto dir = scratch("counts");
    const auto r = run_cli("count-table", dir);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "ok    N=16: ml reactions > sc reactions"));
    CHECK_FALSE(contains(r.out, "FAIL"));
}

TEST_CASE("argument helpers")
{
    CHECK(cli::parse_int_list("0, 2") == std::vector<int>{0, 2});
    CHECK(cli::parse_int_list("").empty());
    CHECK(cli::parse_real_list("0.2,0.4") == std::vector<double>{0.2, 0.4});
    CHECK(cli::parse_bit_string("101") == Bits{1, 0, 1});
    CHECK_THROWS(cli::parse_int_list("1,x"));
    CHECK_THROWS(cli::parse_bit_string("12"));
    CHECK(cli::default_tolerance(CircuitKind::ScDecoder) == 2e-2);
    CHECK(cli::count_table_code(2) == PolarCode(2, {0, 2}));
    const auto a = cli::random_priors(7, 3, 4), b = cli::random_priors(7, 3, 4);
    CHECK(a == b);
    for (const auto& v : a)
        for (double p : v)
            CHECK((p >= 0.05 && p <= 0.95));
}
