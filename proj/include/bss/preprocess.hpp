#pragma once

#include "bss/matrix.hpp"
#include "bss/signal_gen.hpp"

namespace bss {

/// Column means above this magnitude make sample_covariance reject its input.
inline constexpr double kCenteredTolerance = 1e-6;

/// Eigenvalues at or below kEigenvalueFloorRatio * (largest eigenvalue) are
/// treated as zero by whiten().
inline constexpr double kEigenvalueFloorRatio = 1e-12;

struct Centered {
  SignalMatrix x;
  Vector mean;
};

/// Subtracts per-column sample means.
Centered center(const SignalMatrix& x);

/// X^T X / (T - 1) of a centered matrix. Throws ContractError when some
/// column mean exceeds kCenteredTolerance.
Matrix sample_covariance(const SignalMatrix& x);

/// Affine map z = M (x - mean), with M^T M = Sigma^{-1}.
struct WhiteningTransform {
  Vector mean;
  Matrix m;
  Matrix sigma;

  /// Applies the stored centering and whitening to new data (row samples).
  SignalMatrix apply(const SignalMatrix& x) const;
};

struct Whitened {
  SignalMatrix x;
  WhiteningTransform transform;
};

/// Centers x and whitens it with M = Lambda^{-1/2} E^T from Sigma = E Lambda E^T.
/// Throws SingularCovarianceError naming the first eigen-component whose
/// eigenvalue is at or below the floor.
Whitened whiten(const SignalMatrix& x);

}  // namespace bss
