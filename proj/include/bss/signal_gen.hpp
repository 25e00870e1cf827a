#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "bss/matrix.hpp"

namespace bss {

enum class SourceKind { Sine, Line, GaussianNoise };

/// Parametric description of one synthetic source channel. Together with
/// (T, seed) it fully determines the generated column.
struct SourceSpec {
  SourceKind kind = SourceKind::Sine;
  double amplitude = 1.0;           // Sine
  double frequency_divisor = 10.0;  // Sine: s_t = amplitude * sin(t / divisor)
  double sigma = 1.0;               // GaussianNoise std dev
  double intercept = 1.0;           // Line
  double slope = 0.0;               // Line; 0 makes the line a constant

  static SourceSpec sine(double amplitude = 1.0, double frequency_divisor = 10.0);
  static SourceSpec gaussian(double sigma);
  static SourceSpec line(double intercept = 1.0, double slope = 0.0);

  /// Throws ParameterError on non-finite values, sigma < 0 or divisor == 0.
  void validate() const;
};

std::string_view to_string(SourceKind kind);

enum class Provenance { Source, Mixed, Centered, Whitened, Estimated };

std::string_view to_string(Provenance p);

/// T x N sample matrix, one row per time step. Construction enforces
/// T >= 2, N >= 1 and finite entries.
class SignalMatrix {
 public:
  SignalMatrix(Matrix data, Provenance provenance);

  const Matrix& data() const noexcept { return data_; }
  std::size_t t_count() const noexcept { return data_.rows(); }
  std::size_t channels() const noexcept { return data_.cols(); }
  Provenance provenance() const noexcept { return provenance_; }

  Vector column(std::size_t c) const { return data_.column(c); }
  double operator()(std::size_t t, std::size_t c) const { return data_(t, c); }

  bool operator==(const SignalMatrix&) const = default;

 private:
  Matrix data_;
  Provenance provenance_;
};

/// Square, invertible mixing operator A (X = S A).
class MixingMatrix {
 public:
  static constexpr double kDefaultDetTolerance = 1e-12;

  explicit MixingMatrix(Matrix a, double det_tolerance = kDefaultDetTolerance);

  /// The 2x2 matrix used in all canned experiments: [[1, 1], [-1, 3]].
  static MixingMatrix canonical();

  const Matrix& matrix() const noexcept { return a_; }
  std::size_t size() const noexcept { return a_.rows(); }
  Matrix inverse() const;

 private:
  Matrix a_;
};

/// One column of samples for t = 1..t_count (1-based time index).
SignalMatrix generate_source(const SourceSpec& spec, std::size_t t_count,
                             std::uint64_t seed);

/// Column j is generate_source(specs[j], t_count, stream_seed(seed, j)).
SignalMatrix generate_sources(std::span<const SourceSpec> specs, std::size_t t_count,
                              std::uint64_t seed);

/// X = S A, provenance Mixed.
SignalMatrix mix(const SignalMatrix& sources, const MixingMatrix& a);

/// "%.17g" formatting: round-trips every double exactly.
std::string format_g17(double v);

/// CSV with header `t,ch0,ch1,...` and 1-based t.
void write_signal_csv(std::ostream& out, const SignalMatrix& x);

}  // namespace bss
