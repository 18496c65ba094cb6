#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("evoset_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& file) {
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  CliResult run(const std::string& args) const {
    const std::string out = path("stdout.txt");
    const std::string err = path("stderr.txt");
    const std::string cmd = std::string(EVOSET_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  std::string make(const std::string& spec) const {
    const std::string file = path(spec.substr(0, spec.find(':')) + ".chain");
    const CliResult r = run("bench make '" + spec + "' --out " + file);
    EXPECT_EQ(r.code, 0) << r.err;
    return file;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, BenchMakeWritesChainAndFamily) {
  const std::string fam = path("box.family");
  const CliResult r = run("bench make box --params side=3 --out " + path("box.chain") + " --family " + fam);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("box.chain")).rfind("states 9\n", 0), 0u);
  EXPECT_FALSE(slurp(fam).empty());
}

TEST_F(Cli, ProfilePsiOnLazyThreeCycle) {
  const std::string c3 = make("c3");
  const CliResult r = run("profile --chain " + c3 + " --gauge psi");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.3169872981077807"), std::string::npos) << r.out;
}

TEST_F(Cli, EnumerationTooLarge) {
  const std::string chain = make("cycle:n=30");
  EXPECT_EQ(run("profile --chain " + chain + " --gauge phi --method enumerate").code, 3);
}

TEST_F(Cli, MonteCarloNeedsSeed) {
  const std::string chain = make("cycle:n=30");
  EXPECT_EQ(run("profile --chain " + chain + " --gauge phi --method monte-carlo --samples 4").code, 1);
  EXPECT_EQ(run("profile --chain " + chain + " --gauge phi --method monte-carlo --samples 4 --seed 1").code, 0);
}

TEST_F(Cli, Hk2RequiresGamma) {
  const CliResult r = run("bound --theorem hk2 --analytic constant:a=0.5,floor=0.01 --epsilon 0.25");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(run("bound --theorem hk2 --analytic constant:a=0.5,floor=0.01 --epsilon 0.25 --gamma 0.25").code, 0);
}

TEST_F(Cli, UncappedLogLawIsUnbounded) {
  EXPECT_EQ(run("bound --theorem hki --analytic loglaw:c=1,floor=0.001 --epsilon 0.25 --gamma 0.5").code, 4);
}

TEST_F(Cli, BoundJson) {
  const std::string c3 = make("c3");
  const CliResult r = run("bound --theorem hk --chain " + c3 + " --epsilon 0.25");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["theorem"], "hk");
  EXPECT_EQ(j["bound"], 41);
}

TEST_F(Cli, MixJson) {
  const std::string c2 = make("c2");
  const CliResult r = run("mix --chain " + c2 + " --epsilon 0.25 --n-max 100 --continuous");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["tau"]["0.25"], 1);
  EXPECT_NEAR(j["tau_continuous"]["0.25"].get<double>(), std::log(4.0), 1e-3);
}

TEST_F(Cli, VerifyIdentities) {
  const std::string c3 = make("c3");
  const CliResult r = run("verify --chain " + c3 + " --suite identities");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(r.out.rfind("property,max_violation,tolerance,pass\n", 0), 0u);
}

TEST_F(Cli, InequalitiesNeedSeed) {
  const std::string c3 = make("c3");
  EXPECT_EQ(run("verify --chain " + c3 + " --suite inequalities").code, 1);
  EXPECT_EQ(run("verify --chain " + c3 + " --suite inequalities --seed 4").code, 0);
}

TEST_F(Cli, CompareRequiresBench) { EXPECT_EQ(run("compare --epsilon 0.25").code, 1); }

TEST_F(Cli, CompareIsReproducible) {
  const std::string args = "compare --bench c3 --bench box:side=3 --bench 'percolation:side=6,p=0.9,seed=2' --epsilon 0.5,0.25 --seed 5";
  const CliResult a = run(args);
  const CliResult b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("chain,", 0), 0u);
}

TEST_F(Cli, SimulateTraceCsv) {
  const std::string c3 = make("c3");
  const CliResult r = run("simulate --chain " + c3 + " --start 0 --steps 5 --seed 3");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("step,set,measure,weight,u\n", 0), 0u);
}

TEST_F(Cli, UnknownSubcommandIsUsageError) { EXPECT_EQ(run("frobnicate").code, 1); }
