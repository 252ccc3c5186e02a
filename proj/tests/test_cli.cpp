#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dsauction/scenario_io.hpp"
#include "support.hpp"

using namespace dsauction;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(DSAUCTION_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

double field(const std::string& line, const std::string& key) {
  const auto at = line.find(" " + key + "=");
  const auto start = at == std::string::npos ? line.find(key + "=") : at + 1;
  return std::stod(line.substr(start + key.size() + 1));
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dsauction_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    save_scenario(dsauction::testing::r1(), dir_ / "r1.json");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenWritesLoadableScenario) {
  const auto r = cli("gen --seed 9 --buyers 3 --sellers 4 --out " + path("g.json"));
  ASSERT_EQ(r.code, 0);
  const auto s = load_scenario(path("g.json"));
  EXPECT_EQ(s.buyers.size(), 3u);
  EXPECT_EQ(s.sellers.size(), 4u);
  const auto again = cli("gen --seed 9 --buyers 3 --sellers 4");
  EXPECT_EQ(again.out, slurp(path("g.json")));
}

TEST_F(Cli, RunPriceTaking) {
  const auto r = cli("run --scenario " + path("r1.json") + " --out " + path("t.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.rfind("converged=1", 0), 0u) << r.out;
  EXPECT_NEAR(field(r.out, "p"), 2.0 / 3.0, 1e-6);
  const auto trace = slurp(path("t.csv"));
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "k,p,b_0,d_0,beta_0,a_0,alpha_0,rho_0");
  EXPECT_EQ(lines(trace) - 1, static_cast<std::size_t>(field(r.out, "iterations")));
}

TEST_F(Cli, RunAnticipatingNeedsVirtualAgent) {
  EXPECT_EQ(cli("run --mode pa --scenario " + path("r1.json")).code, 2);
  const auto r = cli("run --mode pa --a0 1 --scenario " + path("r1.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(field(r.out, "p"), 0.679178094624, 1e-6);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(cli("run --scenario " + path("missing.json")).code, 1);
  EXPECT_EQ(cli("solve").code, 1);
  std::ofstream(path("bad.json")) << "{\"buyers\": [";
  EXPECT_EQ(cli("solve --scenario " + path("bad.json")).code, 2);
  EXPECT_EQ(cli("solve --mode sideways --scenario " + path("r1.json")).code, 2);
  EXPECT_EQ(cli("solve --ps -1 --scenario " + path("r1.json")).code, 2);
}

TEST_F(Cli, NonConvergenceStillWritesTrace) {
  const auto r = cli("run --max-iters 2 --scenario " + path("r1.json") + " --out " + path("t.csv"));
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.out.rfind("converged=0 iterations=2", 0), 0u) << r.out;
  EXPECT_EQ(lines(slurp(path("t.csv"))), 3u);
}

TEST_F(Cli, SolveJson) {
  const auto r = cli("solve --scenario " + path("r1.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["regime"], "price-taking");
  EXPECT_NEAR(j["price"].get<double>(), 2.0 / 3.0, 1e-12);

  const auto s = nlohmann::json::parse(cli("solve --ps 0.2 --scenario " + path("r1.json")).out);
  EXPECT_NEAR(s["revenue"].get<double>(), 0.055969349109, 1e-9);

  const auto pa = nlohmann::json::parse(cli("solve --mode pa --a0 1e6 --scenario " + path("r1.json")).out);
  EXPECT_NEAR(pa["price"].get<double>(), 2.0 / 3.0, 1e-5);
}

TEST_F(Cli, SolveToFilePrintsSummary) {
  const auto r = cli("solve --scenario " + path("r1.json") + " --out " + path("eq.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("regime=price-taking p=", 0), 0u) << r.out;
  EXPECT_TRUE(nlohmann::json::accept(slurp(path("eq.json"))));
}

TEST_F(Cli, Curves) {
  const auto r = cli("curves --points 50 --scenario " + path("r1.json") + " --out " + path("c.csv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "marks l=0.5 m=1 n=1\n");
  const auto csv = slurp(path("c.csv"));
  EXPECT_EQ(csv.substr(0, 6), "p,D,A\n");
  EXPECT_EQ(lines(csv), 51u);
}

TEST_F(Cli, Sweeps) {
  auto r = cli("sweep-surcharge --points 25 --scenario " + path("r1.json") + " --out " + path("s.csv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("bound=0.5 ps_opt=", 0), 0u) << r.out;
  EXPECT_EQ(lines(slurp(path("s.csv"))), 26u);

  r = cli("sweep-virtual --points 12 --scenario " + path("r1.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "param,p,volume,U,R,L,converged");
  EXPECT_EQ(lines(r.out), 13u);
}

TEST_F(Cli, CompareIsDeterministic) {
  const auto a = cli("compare --seed 11 --a0 0.5");
  const auto b = cli("compare --seed 11 --a0 0.5");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  std::istringstream in(a.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "template,buyers,sellers,U_PT,U_PA,buyers_PT,buyers_PA,sellers_PT,sellers_PA");
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<double> v;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 9u);
    EXPECT_LE(v[4], v[3] + 1e-12);
    ++rows;
  }
  EXPECT_EQ(rows, 5);
}
