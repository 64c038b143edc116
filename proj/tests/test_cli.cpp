#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"mercer_cli"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = mercer::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("mercer_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                       "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"sve", "--kernel", "nope", "--out", path("a.json")}).code, 2);
  EXPECT_EQ(run_cli({"sve", "--kernel", "tanh", "--bogus", "1", "--out", path("a.json")}).code, 2);
  EXPECT_EQ(run_cli({"sve", "--kernel", "tanh", "--tol", "-1", "--out", path("a.json")}).code, 2);
  EXPECT_EQ(run_cli({"sve", "--kernel", "tanh", "--param", "scale", "--out", path("a.json")}).code, 2);
  EXPECT_EQ(run_cli({"decay", "--V", "1", "--r", "0", "--k-range", "5", "--out", path("d.csv")}).code, 2);
  EXPECT_EQ(run_cli({"verify", "--suite", "everything"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, ZeroKernelHasRankZero) {
  const auto r = run_cli({"sve", "--kernel", "zero", "--out", path("z.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("rank 0\n"), std::string::npos);
  EXPECT_EQ(mercer::load_sve(path("z.json")).size(), 0u);
}

TEST_F(CliTest, SveRoundTripAndDeterminism) {
  const auto a = run_cli({"sve", "--kernel", "exp_xy", "--tol", "1e-13", "--out", path("a.json")});
  const auto b = run_cli({"--threads", "2", "sve", "--kernel", "exp_xy", "--tol", "1e-13", "--out", path("b.json")});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));

  const auto e = mercer::load_sve(path("a.json"));
  EXPECT_GE(e.size(), 10u);
  EXPECT_EQ(e.provenance.kernel, "exp_xy");
  mercer::save_sve(e, path("c.json"));
  EXPECT_EQ(slurp(path("a.json")), slurp(path("c.json")));
}

TEST_F(CliTest, SveAcceptsKernelParameters) {
  const auto r = run_cli({"sve", "--kernel", "tanh", "--param", "scale=5", "--tol", "1e-10",
                          "--out", path("t.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("converged true"), std::string::npos);
}

TEST_F(CliTest, DecayTable) {
  const auto r = run_cli({"decay", "--V", "1", "--r", "0", "--k-range", "1:3", "--out", path("d.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(slurp(path("d.csv")));
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "k,legendre_truncation_bound,singular_value_bound,sve_tail_bound");
  std::getline(is, line);
  EXPECT_EQ(line, "1,,,");
  std::getline(is, line);
  ASSERT_EQ(line.substr(0, 2), "2,");
  EXPECT_NEAR(std::stod(line.substr(2)), 1.12838, 1e-5);
}

TEST_F(CliTest, GalleryList) {
  const auto r = run_cli({"gallery", "--list"});
  ASSERT_EQ(r.code, 0);
  for (const char* name : {"tanh", "pyramid", "modulated_pyramid", "k_abs", "k_uni", "k_as", "k_pt"}) {
    EXPECT_NE(r.out.find(std::string("\n") + name + ","), std::string::npos) << name;
  }
}

TEST_F(CliTest, UnwritableOutputIsIoError) {
  const std::string bad = (dir / "missing" / "x.csv").string();
  EXPECT_EQ(run_cli({"decay", "--V", "1", "--r", "0", "--k-range", "2:3", "--out", bad}).code, 3);
  EXPECT_EQ(run_cli({"sve", "--kernel", "zero", "--out", bad}).code, 3);
}

TEST_F(CliTest, VerifyLemmasReport) {
  const auto r = run_cli({"verify", "--suite", "lemmas", "--out", path("v.json")});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["suite"], "lemmas");
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["checks"].size(), 4u);
  EXPECT_EQ(slurp(path("v.json")), r.out);
}

TEST_F(CliTest, VerifyKuniReport) {
  const auto r = run_cli({"verify", "--suite", "kuni"});
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["passed"].get<bool>());
}

TEST_F(CliTest, Figure1Csv) {
  const auto r = run_cli({"figure1", "--kernel", "pyramid", "--max-k", "10", "--y-grid", "17", "--tol", "1e-6",
                          "--out", path("f1.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("chain_holds true"), std::string::npos);
  std::istringstream is(slurp(path("f1.csv")));
  std::string line;
  std::size_t rows = 0;
  std::getline(is, line);
  EXPECT_EQ(line, "k,sve_tail,legendre_bound,analytic_bound");
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 11u);
}
