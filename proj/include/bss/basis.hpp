#pragma once

#include <span>
#include <vector>

#include "bss/matrix.hpp"
#include "bss/rng.hpp"

namespace bss {

struct IterationOptions {
  double tolerance;
  int max_iterations;

  /// Power iteration: change between successive unit iterates.
  static constexpr IterationOptions pca_defaults() { return {1e-10, 1000}; }
  /// FastICA: 1 - |w^T w+|.
  static constexpr IterationOptions ica_defaults() { return {1e-8, 200}; }
};

/// Ordered orthonormal column set W (N x m) plus per-column fit metadata.
struct ComponentBasis {
  Matrix w;
  Vector eigenvalues;            // PCA only, descending
  Vector negentropy;             // ICA only, descending
  std::vector<int> iterations;   // iterations spent on the accepted attempt
  std::vector<int> restarts;     // ICA only
  std::vector<bool> converged;

  std::size_t dimension() const noexcept { return w.rows(); }
  std::size_t components() const noexcept { return w.cols(); }
  bool all_converged() const;
};

/// max |W^T W - I|.
double orthonormality_error(const Matrix& w);

/// v <- v - sum_{i<k} (v^T w_i) w_i over the first k columns of w.
void project_out(std::span<double> v, const Matrix& w, std::size_t k);

/// Gaussian draw normalized to unit length.
Vector random_unit_vector(std::size_t n, Rng& rng);

}  // namespace bss
