#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "bss/errors.hpp"
#include "bss/scenarios.hpp"

using namespace bss;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bss_test_" + name);
  fs::remove_all(dir);
  return dir;
}

// corr(s1 - s2, s1 + 3 s2) for a unit-amplitude sine (variance 1/2) and N(0, sigma^2)
double analytic_mixed_corr(double sigma) {
  const double v = sigma * sigma;
  return (0.5 - 3.0 * v) / std::sqrt((0.5 + v) * (0.5 + 9.0 * v));
}

}  // namespace

TEST(Preset, Contents) {
  const auto ica = ScenarioConfig::preset(ScenarioName::IcaWins);
  EXPECT_EQ(ica.t_count, 10000u);
  EXPECT_EQ(ica.mixing, (Matrix{{1, 1}, {-1, 3}}));
  ASSERT_EQ(ica.sources.size(), 2u);
  EXPECT_EQ(ica.sources[0].kind, SourceKind::Sine);
  EXPECT_EQ(ica.sources[0].frequency_divisor, 10.0);
  EXPECT_EQ(ica.sigma(), kIcaWinsSigma);
  EXPECT_EQ(ica.seed, kDefaultSeed);
  EXPECT_EQ(ScenarioConfig::preset(ScenarioName::Similar).sigma(), 8.0);
  const auto pca = ScenarioConfig::preset(ScenarioName::PcaWins, 9);
  EXPECT_EQ(pca.sources[0].kind, SourceKind::Line);
  EXPECT_EQ(pca.sources[0].slope, 0.0);
  EXPECT_EQ(pca.sigma(), 10.0);
  EXPECT_EQ(pca.seed, 9u);
}

TEST(Preset, NamesRoundTrip) {
  for (auto n : {ScenarioName::IcaWins, ScenarioName::Similar, ScenarioName::PcaWins,
                 ScenarioName::Custom})
    EXPECT_EQ(parse_scenario_name(to_string(n)), n);
  EXPECT_FALSE(parse_scenario_name("ica_wins").has_value());
}

TEST(Config, Validation) {
  auto cfg = ScenarioConfig::preset(ScenarioName::Similar);
  cfg.t_count = 1;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = ScenarioConfig::preset(ScenarioName::Similar);
  cfg.mixing = Matrix::identity(3);
  EXPECT_THROW(cfg.validate(), ShapeError);
  cfg = ScenarioConfig::preset(ScenarioName::Similar);
  cfg.run_pca = cfg.run_ica = false;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = ScenarioConfig::preset(ScenarioName::Similar);
  cfg.mixing = Matrix{{1, 2}, {2, 4}};
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(RunScenario, IcaWinsDefaults) {
  const ScenarioResult r = run_scenario(ScenarioConfig::preset(ScenarioName::IcaWins));
  ASSERT_TRUE(r.ica && r.pca);
  for (double v : r.ica->rmse) EXPECT_LT(v, 0.05);
  for (double v : r.pca->rmse) EXPECT_GT(v, 0.3);
  EXPECT_EQ(r.ica->method, "ica");
  EXPECT_EQ(r.pca->scenario, "ica-wins");
}

TEST(RunScenario, SimilarDefaults) {
  const ScenarioResult r = run_scenario(ScenarioConfig::preset(ScenarioName::Similar));
  for (double v : r.ica->rmse) EXPECT_LT(v, 0.05);
  for (double v : r.pca->rmse) EXPECT_LT(v, 0.05);
  EXPECT_NEAR(r.mixed_correlation, analytic_mixed_corr(8.0), 0.02);
}

TEST(RunScenario, PcaWinsDefaults) {
  const ScenarioResult r = run_scenario(ScenarioConfig::preset(ScenarioName::PcaWins));
  ASSERT_TRUE(r.pca);
  EXPECT_FALSE(r.pca->degenerate);
  for (double v : r.pca->rmse) EXPECT_LT(v, 1e-6);
  // the constant source leaves the centered mixture rank one, so whitening
  // hits the eigenvalue floor and ICA reports degenerate instead of failing the run
  ASSERT_TRUE(r.ica);
  EXPECT_TRUE(r.ica->degenerate);
  EXPECT_NE(r.ica->message.find("singular covariance"), std::string::npos);
  EXPECT_TRUE(std::isnan(r.ica->rmse[0]));
  EXPECT_FALSE(r.ica_estimate.has_value());
}

TEST(RunScenario, MethodsShareData) {
  auto cfg = ScenarioConfig::preset(ScenarioName::Similar, 3);
  const ScenarioResult both = run_scenario(cfg);
  cfg.run_ica = false;
  const ScenarioResult pca_only = run_scenario(cfg);
  EXPECT_EQ(both.mixed, pca_only.mixed);
  EXPECT_EQ(both.pca->rmse, pca_only.pca->rmse);
  EXPECT_FALSE(pca_only.ica.has_value());
}

TEST(RunScenario, BitIdenticalReports) {
  const auto cfg = ScenarioConfig::preset(ScenarioName::Similar, 42);
  const ScenarioResult a = run_scenario(cfg), b = run_scenario(cfg);
  EXPECT_EQ(to_json(*a.pca).dump(), to_json(*b.pca).dump());
  EXPECT_EQ(to_json(*a.ica).dump(), to_json(*b.ica).dump());
  EXPECT_EQ(a.ica_estimate, b.ica_estimate);
}

TEST(RunScenario, IcaWinsDominanceOverSeeds) {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const ScenarioResult r = run_scenario(ScenarioConfig::preset(ScenarioName::IcaWins, seed));
    wins += r.ica->total_rmse() < r.pca->total_rmse();
  }
  EXPECT_GE(wins, 95);
}

TEST(RunScenario, PcaWinsDominanceOverSeeds) {
  // a degenerate ICA report recovered nothing, which counts as PCA <= ICA
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const ScenarioResult r = run_scenario(ScenarioConfig::preset(ScenarioName::PcaWins, seed));
    wins += r.ica->degenerate || r.pca->total_rmse() <= r.ica->total_rmse();
  }
  EXPECT_GE(wins, 95);
}

TEST(Sweep, SingletonMatchesRun) {
  const auto base = ScenarioConfig::preset(ScenarioName::IcaWins, 5);
  const auto rows = sweep(base, {1.0}, {5});
  ASSERT_EQ(rows.size(), 1u);
  auto cfg = base;
  cfg.set_sigma(1.0);
  const ScenarioResult direct = run_scenario(cfg);
  ASSERT_TRUE(rows[0].result);
  EXPECT_EQ(to_json(*rows[0].result->pca).dump(), to_json(*direct.pca).dump());
  EXPECT_EQ(to_json(*rows[0].result->ica).dump(), to_json(*direct.ica).dump());
}

TEST(Sweep, PcaImprovesWithNoiseAndCorrelationApproachesMinusOne) {
  const std::vector<double> sigmas{8.0, 1.0, 4.0, 2.0};  // unsorted on purpose
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
  const auto rows = sweep(ScenarioConfig::preset(ScenarioName::IcaWins), sigmas, seeds, 2);
  ASSERT_EQ(rows.size(), 40u);
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_TRUE(rows[i - 1].sigma < rows[i].sigma ||
                (rows[i - 1].sigma == rows[i].sigma && rows[i - 1].seed < rows[i].seed));

  std::map<double, double> mean_pca;
  for (const auto& row : rows) {
    ASSERT_TRUE(row.result) << row.error;
    mean_pca[row.sigma] += row.result->pca->total_rmse() / 20.0;
    if (row.sigma == 8.0) EXPECT_LT(row.result->mixed_correlation, -0.9);
  }
  EXPECT_GT(mean_pca[1.0], mean_pca[2.0]);
  EXPECT_GT(mean_pca[2.0], mean_pca[4.0]);
  EXPECT_GT(mean_pca[4.0], mean_pca[8.0]);
}

TEST(Sweep, ParallelMatchesSerial) {
  const auto base = ScenarioConfig::preset(ScenarioName::Similar);
  const auto a = sweep(base, {1.0, 8.0}, {1, 2, 3}, 1);
  const auto b = sweep(base, {1.0, 8.0}, {1, 2, 3}, 4);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_EQ(to_json(*a[i].result->ica).dump(), to_json(*b[i].result->ica).dump());
}

TEST(Sweep, RowFailuresAreRecorded) {
  const auto rows = sweep(ScenarioConfig::preset(ScenarioName::IcaWins), {-1.0, 1.0}, {1});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].result.has_value());
  EXPECT_FALSE(rows[0].error.empty());
  EXPECT_TRUE(rows[1].result.has_value());
  EXPECT_THROW(sweep(ScenarioConfig::preset(ScenarioName::IcaWins), {}, {1}), ParameterError);
  EXPECT_THROW(sweep(ScenarioConfig::preset(ScenarioName::IcaWins), {1.0}, {}), ParameterError);
}

TEST(Outputs, FilesAndTableLayout) {
  const fs::path dir = fresh_dir("outputs");
  std::vector<ScenarioResult> results;
  for (auto n : {ScenarioName::IcaWins, ScenarioName::PcaWins}) {
    auto cfg = ScenarioConfig::preset(n);
    cfg.t_count = 2000;
    results.push_back(run_scenario(cfg));
    write_scenario_outputs(results.back(), dir, false);
  }
  write_tables(results, dir, false);

  EXPECT_TRUE(fs::exists(dir / "report_ica-wins_pca.json"));
  EXPECT_TRUE(fs::exists(dir / "report_ica-wins_ica.json"));
  EXPECT_TRUE(fs::exists(dir / "report_pca-wins_ica.json"));

  const auto table = lines(slurp(dir / "tables.csv"));
  ASSERT_EQ(table.size(), 5u);
  EXPECT_EQ(table[0], "scenario,source,PCA,ICA");
  EXPECT_EQ(table[3], "pca-wins,First Source,0.000,NA");
  EXPECT_EQ(table[4], "pca-wins,Second Source,0.000,NA");

  const auto signals = lines(slurp(dir / "signals_ica-wins.csv"));
  ASSERT_EQ(signals.size(), 2001u);
  EXPECT_EQ(signals[0], "t,source_1,source_2,mixed_1,mixed_2,pca_1,pca_2,ica_1,ica_2");
  EXPECT_EQ(signals[1].substr(0, 2), "1,");
  const auto pca_signals = lines(slurp(dir / "signals_pca-wins.csv"));
  EXPECT_EQ(pca_signals[1].substr(pca_signals[1].size() - 6), ",NA,NA");

  EXPECT_THROW(write_tables(results, dir, false), OutputExistsError);
  EXPECT_NO_THROW(write_tables(results, dir, true));
  fs::remove_all(dir);
}

TEST(Outputs, SweepCsv) {
  const fs::path dir = fresh_dir("sweep");
  auto base = ScenarioConfig::preset(ScenarioName::IcaWins);
  base.t_count = 1000;
  const auto rows = sweep(base, {1.0, -2.0}, {1, 2, 3});
  write_sweep(rows, dir, false);
  const auto csv = lines(slurp(dir / "sweep.csv"));
  ASSERT_EQ(csv.size(), 7u);
  EXPECT_EQ(csv[0], "sigma,seed,mixed_corr,pca_rmse_1,pca_rmse_2,ica_rmse_1,ica_rmse_2,status");
  for (std::size_t i = 1; i < csv.size(); ++i)
    EXPECT_EQ(std::count(csv[i].begin(), csv[i].end(), ','), 7) << csv[i];
  EXPECT_EQ(csv[1].substr(0, 3), "-2,");
  EXPECT_NE(csv[1].find(",error: "), std::string::npos);
  EXPECT_EQ(csv[6].substr(csv[6].size() - 3), ",ok");
  fs::remove_all(dir);
}
