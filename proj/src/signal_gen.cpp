#include "bss/signal_gen.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "bss/errors.hpp"
#include "bss/linalg.hpp"
#include "bss/rng.hpp"

namespace bss {

SourceSpec SourceSpec::sine(double amplitude, double frequency_divisor) {
  SourceSpec s;
  s.kind = SourceKind::Sine;
  s.amplitude = amplitude;
  s.frequency_divisor = frequency_divisor;
  return s;
}

SourceSpec SourceSpec::gaussian(double sigma) {
  SourceSpec s;
  s.kind = SourceKind::GaussianNoise;
  s.sigma = sigma;
  return s;
}

SourceSpec SourceSpec::line(double intercept, double slope) {
  SourceSpec s;
  s.kind = SourceKind::Line;
  s.intercept = intercept;
  s.slope = slope;
  return s;
}

void SourceSpec::validate() const {
  for (double v : {amplitude, frequency_divisor, sigma, intercept, slope})
    if (!std::isfinite(v)) throw ParameterError("source spec has a non-finite parameter");
  if (sigma < 0.0) throw ParameterError("source spec: sigma must be >= 0");
  if (frequency_divisor == 0.0) throw ParameterError("source spec: frequency_divisor must be nonzero");
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::Sine: return "sine";
    case SourceKind::Line: return "line";
    case SourceKind::GaussianNoise: return "gaussian";
  }
  return "?";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Source: return "source";
    case Provenance::Mixed: return "mixed";
    case Provenance::Centered: return "centered";
    case Provenance::Whitened: return "whitened";
    case Provenance::Estimated: return "estimated";
  }
  return "?";
}

SignalMatrix::SignalMatrix(Matrix data, Provenance provenance)
    : data_(std::move(data)), provenance_(provenance) {
  if (data_.rows() < 2) throw ShapeError("signal matrix needs at least 2 samples");
  if (data_.cols() < 1) throw ShapeError("signal matrix needs at least 1 channel");
  for (double v : data_.data())
    if (!std::isfinite(v)) throw ParameterError("signal matrix has a non-finite entry");
}

MixingMatrix::MixingMatrix(Matrix a, double det_tolerance) : a_(std::move(a)) {
  if (a_.rows() != a_.cols() || a_.rows() == 0) throw ShapeError("mixing matrix must be square");
  for (double v : a_.data())
    if (!std::isfinite(v)) throw ParameterError("mixing matrix has a non-finite entry");
  if (std::abs(linalg::determinant(a_)) <= det_tolerance)
    throw ParameterError("mixing matrix is not invertible");
}

MixingMatrix MixingMatrix::canonical() { return MixingMatrix({{1.0, 1.0}, {-1.0, 3.0}}); }

Matrix MixingMatrix::inverse() const { return linalg::inverse(a_); }

SignalMatrix generate_source(const SourceSpec& spec, std::size_t t_count, std::uint64_t seed) {
  spec.validate();
  if (t_count < 2) throw ParameterError("t_count must be >= 2");

  Matrix col(t_count, 1);
  switch (spec.kind) {
    case SourceKind::Sine:
      for (std::size_t i = 0; i < t_count; ++i) {
        const double t = static_cast<double>(i + 1);
        col(i, 0) = spec.amplitude * std::sin(t / spec.frequency_divisor);
      }
      break;
    case SourceKind::Line:
      for (std::size_t i = 0; i < t_count; ++i) {
        const double t = static_cast<double>(i + 1);
        col(i, 0) = spec.intercept + spec.slope * t;
      }
      break;
    case SourceKind::GaussianNoise: {
      Rng rng(seed);
      for (std::size_t i = 0; i < t_count; ++i) col(i, 0) = spec.sigma * rng.normal();
      break;
    }
  }
  return SignalMatrix(std::move(col), Provenance::Source);
}

SignalMatrix generate_sources(std::span<const SourceSpec> specs, std::size_t t_count,
                              std::uint64_t seed) {
  if (specs.empty()) throw ParameterError("at least one source spec is required");
  Matrix s(t_count, specs.size());
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const auto stream = static_cast<std::uint64_t>(Stream::kSourceBase) + j;
    const auto col = generate_source(specs[j], t_count, stream_seed(seed, stream));
    s.set_column(j, col.column(0));
  }
  return SignalMatrix(std::move(s), Provenance::Source);
}

SignalMatrix mix(const SignalMatrix& sources, const MixingMatrix& a) {
  if (sources.channels() != a.size())
    throw ShapeError("mix: source channel count differs from mixing matrix size");
  return SignalMatrix(sources.data() * a.matrix(), Provenance::Mixed);
}

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_signal_csv(std::ostream& out, const SignalMatrix& x) {
  out << 't';
  for (std::size_t c = 0; c < x.channels(); ++c) out << ",ch" << c;
  out << '\n';
  for (std::size_t t = 0; t < x.t_count(); ++t) {
    out << (t + 1);
    for (std::size_t c = 0; c < x.channels(); ++c) out << ',' << format_g17(x(t, c));
    out << '\n';
  }
}

}  // namespace bss
