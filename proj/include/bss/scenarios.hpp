#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bss/errors.hpp"
#include "bss/eval.hpp"
#include "bss/signal_gen.hpp"

namespace bss {

enum class ScenarioName { IcaWins, Similar, PcaWins, Custom };

std::string_view to_string(ScenarioName name);
/// Accepts "ica-wins", "similar", "pca-wins", "custom".
std::optional<ScenarioName> parse_scenario_name(std::string_view text);

/// Noise level of the ica-wins preset. See README for why it is not 1.
inline constexpr double kIcaWinsSigma = 0.4;
inline constexpr double kSimilarSigma = 8.0;
inline constexpr double kPcaWinsSigma = 10.0;
inline constexpr std::uint64_t kDefaultSeed = 1;

struct ScenarioConfig {
  ScenarioName name = ScenarioName::Custom;
  std::size_t t_count = 10000;
  std::vector<SourceSpec> sources;
  Matrix mixing = MixingMatrix::canonical().matrix();
  std::uint64_t seed = kDefaultSeed;
  bool run_pca = true;
  bool run_ica = true;

  /// ica-wins: sine + N(0, 0.4^2); similar: sine + N(0, 8^2);
  /// pca-wins: constant line + N(0, 10^2). T = 10000, A = [[1, 1], [-1, 3]].
  static ScenarioConfig preset(ScenarioName name, std::uint64_t seed = kDefaultSeed);

  /// Sets sigma on every gaussian source.
  void set_sigma(double sigma);
  /// Sigma of the first gaussian source, NaN when there is none.
  double sigma() const;

  /// Throws ParameterError / ShapeError on an unusable configuration.
  void validate() const;
};

struct ScenarioResult {
  ScenarioConfig config;
  SignalMatrix sources;
  SignalMatrix mixed;
  double mixed_correlation;  // corr(x_1, x_2), NaN for a single channel
  std::optional<EvaluationReport> pca;
  std::optional<EvaluationReport> ica;
  std::optional<SignalMatrix> pca_estimate;
  std::optional<SignalMatrix> ica_estimate;
};

/// Generate S, mix X = S A, then per method
///   PCA: center -> pca_fit(m = N) -> project -> rmse_report
///   ICA: whiten -> ica_fit -> transform -> rmse_report
/// Both methods see the same data. A failing method stage yields a
/// degenerate report instead of aborting the other method.
ScenarioResult run_scenario(const ScenarioConfig& config);

struct SweepRow {
  double sigma;
  std::uint64_t seed;
  std::optional<ScenarioResult> result;
  std::string error;  // set when the run itself failed
};

/// Cross product sigma x seed, sorted by (sigma, seed). jobs > 1 runs
/// independent configurations on worker threads.
std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::vector<double>& sigmas,
                            const std::vector<std::uint64_t>& seeds, unsigned jobs = 1);

/// Thrown when an output file exists and overwriting was not requested.
class OutputExistsError : public Error {
 public:
  using Error::Error;
};

/// Writes report_<scenario>_<method>.json and signals_<scenario>.csv.
void write_scenario_outputs(const ScenarioResult& result, const std::filesystem::path& dir,
                            bool force);

/// tables.csv: one row per (scenario, source) with PCA and ICA RMSE at
/// three decimals, "NA" for degenerate methods.
void write_tables(const std::vector<ScenarioResult>& results, const std::filesystem::path& dir,
                  bool force);

/// sweep.csv: one row per (sigma, seed).
void write_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& dir, bool force);

}  // namespace bss
