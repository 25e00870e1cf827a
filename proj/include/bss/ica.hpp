#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "bss/basis.hpp"
#include "bss/signal_gen.hpp"

namespace bss {

/// E[log cosh U] for U ~ N(0, 1). Derived by scripts/gauss_baseline.py.
inline constexpr double kLogCoshGaussBaseline = 0.374567207491437974;

/// Whitened-input check used by ica_fit: |mean| and |cov - I| entries.
inline constexpr double kWhitenedTolerance = 1e-3;

/// Norm below which a Gram-Schmidt remainder counts as zero.
inline constexpr double kDeflationFloor = 1e-12;

/// Non-quadratic contrast Phi with its first two derivatives.
struct ContrastFunction {
  using Fn = double (*)(double);

  std::string_view name;
  Fn big_phi;     // Phi
  Fn phi;         // Phi'
  Fn phi_prime;   // Phi''
  double gauss_baseline;  // E[Phi(U)], U standard normal

  /// Phi(y) = log cosh y, phi = tanh, phi' = 1 - tanh^2.
  static ContrastFunction log_cosh();
};

struct NegentropyEstimate {
  double value;           // (mean Phi(y) - gauss_baseline)^2
  double gauss_baseline;
};

/// Negentropy approximation of a standardized sample. Throws ContractError
/// when mean or variance are off by more than kWhitenedTolerance.
NegentropyEstimate negentropy(std::span<const double> y, const ContrastFunction& contrast);

/// One Newton step in the form
///   w+ = E[phi'(w^T x)] w - E[x phi(w^T x)]
/// (sample averages over all rows). This is the negative of the textbook
/// FastICA update; the sign drops out after normalization.
Vector fixed_point_update(const SignalMatrix& x_white, std::span<const double> w,
                          const ContrastFunction& contrast);

struct GramSchmidtStep {
  Vector theta;  // alpha minus its projection on the first k columns
  Vector w;      // theta / |theta|
};

/// Projects alpha off the first k columns of previous and normalizes.
/// Throws DegenerateDeflationError when |theta| < kDeflationFloor.
GramSchmidtStep gram_schmidt_step(std::span<const double> alpha, const Matrix& previous,
                                  std::size_t k);

/// Deflationary FastICA on whitened data. Returns a square orthonormal W
/// whose columns are sorted by descending negentropy and sign-normalized.
/// Each component gets one restart from a fresh random vector before it is
/// flagged as not converged.
ComponentBasis ica_fit(const SignalMatrix& x_white,
                       const ContrastFunction& contrast = ContrastFunction::log_cosh(),
                       IterationOptions opts = IterationOptions::ica_defaults(),
                       std::uint64_t seed = 0);

/// Y = X W (row samples).
SignalMatrix ica_transform(const SignalMatrix& x_white, const ComponentBasis& basis);

}  // namespace bss
