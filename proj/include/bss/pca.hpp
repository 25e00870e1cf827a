#pragma once

#include <cstdint>

#include "bss/basis.hpp"
#include "bss/signal_gen.hpp"

namespace bss {

/// Top-m eigenvectors of the sample covariance of a centered x, found one
/// at a time by power iteration with Hotelling deflation
/// (Sigma <- Sigma - lambda w w^T). Columns are sorted by descending
/// eigenvalue and sign-normalized (largest-magnitude entry positive).
/// A column that does not settle within opts.max_iterations is returned
/// with converged = false. Throws ShapeError when m is outside [1, N].
ComponentBasis pca_fit(const SignalMatrix& x, std::size_t m,
                       IterationOptions opts = IterationOptions::pca_defaults(),
                       std::uint64_t seed = 0);

/// Same as pca_fit, starting from a symmetric positive semi-definite matrix.
ComponentBasis pca_fit_covariance(const Matrix& sigma, std::size_t m,
                                  IterationOptions opts = IterationOptions::pca_defaults(),
                                  std::uint64_t seed = 0);

/// Scores Z = X W.
SignalMatrix pca_project(const SignalMatrix& x, const ComponentBasis& basis);

/// (1/T) * ||X - X W W^T||_F^2.
double reconstruction_error(const SignalMatrix& x, const ComponentBasis& basis);

}  // namespace bss
