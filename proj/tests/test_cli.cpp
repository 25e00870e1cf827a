#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "bss/cli.hpp"
#include "bss/errors.hpp"

using namespace bss;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bss_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string out_dir(const std::string& sub = "out") const { return (dir_ / sub).string(); }

  fs::path write_file(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST(ConfigParse, FullFile) {
  const auto fc = cli::parse_config(
      "# comment\n"
      "sources = sine, gaussian\n"
      "t = 500   # trailing comment\n"
      "sigma = 2.5\n"
      "seed = 7\n"
      "amplitude = 3\n"
      "frequency_divisor = 20\n"
      "mixing = 1, 0; 0.5, 1\n"
      "methods = ica\n"
      "out_dir = results\n");
  EXPECT_EQ(fc.scenario.name, ScenarioName::Custom);
  EXPECT_EQ(fc.scenario.t_count, 500u);
  EXPECT_EQ(fc.scenario.sigma(), 2.5);
  EXPECT_EQ(fc.scenario.seed, 7u);
  EXPECT_EQ(fc.scenario.sources[0].amplitude, 3.0);
  EXPECT_EQ(fc.scenario.sources[0].frequency_divisor, 20.0);
  EXPECT_EQ(fc.scenario.mixing, (Matrix{{1, 0}, {0.5, 1}}));
  EXPECT_FALSE(fc.scenario.run_pca);
  EXPECT_TRUE(fc.scenario.run_ica);
  ASSERT_TRUE(fc.out_dir);
  EXPECT_EQ(*fc.out_dir, fs::path("results"));
}

TEST(ConfigParse, PresetBase) {
  const auto fc = cli::parse_config("scenario = pca-wins\nintercept = 2\n");
  EXPECT_EQ(fc.scenario.name, ScenarioName::PcaWins);
  EXPECT_EQ(fc.scenario.sources[0].intercept, 2.0);
  EXPECT_EQ(fc.scenario.sigma(), kPcaWinsSigma);
}

TEST(ConfigParse, UnknownKeyListsValidKeys) {
  try {
    cli::parse_config("sigmaa = 2\n");
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("sigmaa"), std::string::npos);
    for (auto key : cli::kConfigKeys) EXPECT_NE(msg.find(key), std::string::npos) << key;
  }
}

TEST(ConfigParse, Rejections) {
  EXPECT_THROW(cli::parse_config("t 5\n"), ParameterError);
  EXPECT_THROW(cli::parse_config("t = 5\nt = 6\n"), ParameterError);
  EXPECT_THROW(cli::parse_config("t = 1\n"), ParameterError);
  EXPECT_THROW(cli::parse_config("t = -3\n"), ParameterError);
  EXPECT_THROW(cli::parse_config("sigma = nan\n"), ParameterError);
  EXPECT_THROW(cli::parse_config("sigma = -1\n"), ParameterError);
  EXPECT_THROW(cli::parse_config("sources = sine, laser\n"), ParameterError);
  EXPECT_THROW(cli::parse_config("mixing = 1, 2, 3\n"), ParameterError);
  EXPECT_THROW(cli::parse_config("slope = 1\n"), ParameterError);  // no line source
  EXPECT_THROW(cli::parse_config("methods = svd\n"), ParameterError);
  EXPECT_THROW(cli::parse_config("scenario = best\n"), ParameterError);
}

TEST(Override, KeysAndErrors) {
  auto cfg = ScenarioConfig::preset(ScenarioName::Similar);
  fs::path out = "x";
  cli::apply_override("t=300", cfg, out);
  cli::apply_override("sigma = 3", cfg, out);
  cli::apply_override("seed=11", cfg, out);
  cli::apply_override("out_dir=elsewhere", cfg, out);
  EXPECT_EQ(cfg.t_count, 300u);
  EXPECT_EQ(cfg.sigma(), 3.0);
  EXPECT_EQ(cfg.seed, 11u);
  EXPECT_EQ(out, fs::path("elsewhere"));
  try {
    cli::apply_override("mixing=1", cfg, out);
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    for (auto key : cli::kOverrideKeys) EXPECT_NE(std::string(e.what()).find(key), std::string::npos);
  }
  EXPECT_THROW(cli::apply_override("t", cfg, out), ParameterError);
}

TEST(NumberList, Parse) {
  EXPECT_EQ(cli::parse_number_list("1, 2.5,8"), (std::vector<double>{1, 2.5, 8}));
  EXPECT_THROW(cli::parse_number_list("1,,2"), ParameterError);
  EXPECT_THROW(cli::parse_number_list("1,x"), ParameterError);
  EXPECT_THROW(cli::parse_number_list(""), ParameterError);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {}, {"frobnicate"}, {"run", "--bogus"}, {"run", "--t", "abc"}, {"sweep", "--jobs"}}) {
    const Outcome o = run(args);
    EXPECT_EQ(o.code, 1);
    EXPECT_NE(o.err.find("error:"), std::string::npos);
    EXPECT_NE(o.err.find("Usage"), std::string::npos);
  }
}

TEST_F(CliTest, HelpExitsZero) {
  const Outcome o = run({"--help"});
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("selftest"), std::string::npos);
}

TEST_F(CliTest, InvalidValuesExitOne) {
  EXPECT_EQ(run({"run", "--scenario", "nope", "--out", out_dir()}).code, 1);
  EXPECT_EQ(run({"run", "--scenario", "similar", "--t", "1", "--out", out_dir()}).code, 1);
  EXPECT_EQ(run({"run", "--scenario", "pca-wins", "--sigma", "-2", "--out", out_dir()}).code, 1);
  const Outcome o = run({"run", "--scenario", "similar", "--set", "foo=1", "--out", out_dir()});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("valid keys"), std::string::npos);
  EXPECT_FALSE(fs::exists(out_dir()));
}

TEST_F(CliTest, UnknownConfigKeyExitOne) {
  const auto cfg = write_file("bad.cfg", "t = 100\nnoise = 3\n");
  const Outcome o = run({"run", "--scenario", cfg.string(), "--out", out_dir()});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("noise"), std::string::npos);
  EXPECT_NE(o.err.find("frequency_divisor"), std::string::npos);
}

TEST_F(CliTest, RunIsByteIdenticalAcrossReruns) {
  ASSERT_EQ(run({"run", "--scenario", "similar", "--seed", "42", "--out", out_dir("a")}).code, 0);
  const Outcome again = run({"run", "--scenario", "similar", "--seed", "42", "--out", out_dir("a")});
  EXPECT_EQ(again.code, 1);
  EXPECT_NE(again.err.find("--force"), std::string::npos);

  const std::vector<std::string> names{"report_similar_pca.json", "report_similar_ica.json",
                                       "signals_similar.csv", "tables.csv"};
  std::vector<std::string> first;
  for (const auto& n : names) first.push_back(slurp(dir_ / "a" / n));
  ASSERT_EQ(run({"run", "--scenario", "similar", "--seed", "42", "--out", out_dir("a"), "--force"})
                .code,
            0);
  ASSERT_EQ(run({"run", "--scenario", "similar", "--seed", "42", "--out", out_dir("b")}).code, 0);
  for (std::size_t i = 0; i < names.size(); ++i) {
    EXPECT_FALSE(first[i].empty()) << names[i];
    EXPECT_EQ(slurp(dir_ / "a" / names[i]), first[i]) << names[i];
    EXPECT_EQ(slurp(dir_ / "b" / names[i]), first[i]) << names[i];
  }
}

TEST_F(CliTest, RunAllWritesEveryScenario) {
  const Outcome o = run({"run", "--t", "2000", "--out", out_dir()});
  ASSERT_EQ(o.code, 0) << o.err;
  for (const char* s : {"ica-wins", "similar", "pca-wins"})
    EXPECT_TRUE(fs::exists(dir_ / "out" / (std::string("signals_") + s + ".csv")));
  EXPECT_EQ(line_count(slurp(dir_ / "out" / "tables.csv")), 7u);
  EXPECT_NE(o.out.find("degenerate"), std::string::npos);
}

TEST_F(CliTest, PcaWinsTableRow) {
  ASSERT_EQ(run({"run", "--scenario", "pca-wins", "--out", out_dir()}).code, 0);
  const std::string table = slurp(dir_ / "out" / "tables.csv");
  EXPECT_NE(table.find("pca-wins,First Source,0.000,NA\n"), std::string::npos) << table;
  EXPECT_NE(table.find("pca-wins,Second Source,0.000,NA\n"), std::string::npos) << table;
}

TEST_F(CliTest, ConfigFileRun) {
  const auto cfg = write_file("exp.cfg",
                              "sources = sine, gaussian\nt = 800\nsigma = 0.5\nmethods = pca\n"
                              "out_dir = " + out_dir("from_cfg") + "\n");
  const Outcome o = run({"run", "--scenario", cfg.string(), "--set", "seed=3"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(fs::exists(dir_ / "from_cfg" / "report_custom_pca.json"));
  EXPECT_FALSE(fs::exists(dir_ / "from_cfg" / "report_custom_ica.json"));
  EXPECT_NE(o.out.find("seed 3"), std::string::npos);
  EXPECT_EQ(line_count(slurp(dir_ / "from_cfg" / "signals_custom.csv")), 801u);
}

TEST_F(CliTest, SweepRows) {
  const Outcome o =
      run({"sweep", "--sigma", "1,8", "--seeds", "3", "--t", "2000", "--out", out_dir()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(line_count(slurp(dir_ / "out" / "sweep.csv")), 7u);
  EXPECT_NE(o.out.find("6 rows"), std::string::npos);
  EXPECT_EQ(run({"sweep", "--sigma", "1,x", "--out", out_dir("b")}).code, 1);
  EXPECT_EQ(run({"sweep", "--scenario", "pca-wins", "--seeds", "0", "--out", out_dir("c")}).code,
            1);
}

TEST_F(CliTest, SelftestExitTracksVerdict) {
  // the first 14 cases (seed 1) all have well separated spectra
  const Outcome pass = run({"selftest", "--pca-cases", "14", "--ica-cases", "5"});
  EXPECT_EQ(pass.code, 0) << pass.out << pass.err;
  EXPECT_NE(pass.out.find("14/14"), std::string::npos) << pass.out;
  EXPECT_NE(pass.out.find("5/5"), std::string::npos) << pass.out;

  // case 14 has eigenvalues 1.80272 and 1.80231: power iteration cannot
  // separate them within 1000 iterations, and selftest must say so
  const Outcome fail = run({"selftest", "--pca-cases", "15", "--ica-cases", "1"});
  EXPECT_EQ(fail.code, 2);
  EXPECT_NE(fail.out.find("14/15"), std::string::npos) << fail.out;
}

TEST_F(CliTest, BinaryExitCodes) {
  const std::string tool = BSS_TOOL_PATH;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status(tool + " --help"), 0);
  EXPECT_EQ(status(tool + " run --definitely-not-a-flag"), 1);
  EXPECT_EQ(status(tool + " run --scenario ica-wins --t 500 --out " + out_dir()), 0);
  // output directory path is an existing regular file: a runtime failure
  const auto blocker = write_file("blocker", "x");
  EXPECT_EQ(status(tool + " run --scenario ica-wins --t 500 --out " + (blocker / "sub").string()),
            2);
}
