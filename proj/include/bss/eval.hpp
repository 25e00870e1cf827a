#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bss/matrix.hpp"
#include "bss/signal_gen.hpp"

namespace bss {

/// Exhaustive alignment handles at most this many channels (8! * 2^8 candidates).
inline constexpr std::size_t kMaxAlignChannels = 8;

/// A column whose population std dev is at most this fraction of the largest
/// column RMS in its matrix is treated as constant and standardizes to zeros.
inline constexpr double kConstantColumnRatio = 1e-9;

/// Estimated column i is matched to true column permutation[i], multiplied
/// by signs[i]; scales[i] = std(estimated_i) / std(truth_permutation[i])
/// (1 when either side is constant).
struct Alignment {
  std::vector<std::size_t> permutation;
  std::vector<int> signs;
  Vector scales;
};

/// Per-source RMSE of aligned, standardized estimates plus diagnostics of
/// the aligned estimate. Degenerate reports carry NaN RMSE values.
struct EvaluationReport {
  std::string method;
  std::string scenario;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
  Vector rmse;
  Matrix correlation;
  Vector kurtosis;  // NaN where undefined (constant column)
  Alignment alignment;
  bool degenerate = false;
  std::string message;

  double total_rmse() const;
};

struct Diagnostics {
  Matrix correlation;
  Vector kurtosis;  // excess kurtosis; NaN for constant columns
};

/// Mean 0 / variance 1 (population convention) per column; constant
/// columns map to zeros.
Matrix standardize(const Matrix& x);

/// Best signed permutation under total standardized RMSE; ties resolved by
/// the lexicographically smallest permutation, then by +1 signs.
Alignment align(const SignalMatrix& estimated, const SignalMatrix& truth);

/// Standardized estimate columns reordered and sign-flipped into the
/// column order of the truth they were aligned to.
Matrix apply_alignment(const SignalMatrix& estimated, const Alignment& alignment);

EvaluationReport rmse_report(const SignalMatrix& estimated, const SignalMatrix& truth);

/// Pearson correlation and excess kurtosis. Requires T >= 4.
Diagnostics diagnostics(const SignalMatrix& x);

/// Report with NaN RMSE for a method stage that could not run.
EvaluationReport degenerate_report(std::size_t channels, std::string message);

nlohmann::ordered_json to_json(const EvaluationReport& report);

}  // namespace bss
