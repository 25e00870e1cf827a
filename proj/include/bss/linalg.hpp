#pragma once

#include "bss/matrix.hpp"

namespace bss::linalg {

struct SymmetricEigen {
  Vector values;  // descending
  Matrix vectors; // column j pairs with values[j]
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Accurate to
/// working precision even for clustered eigenvalues, which is what the
/// whitening step needs.
SymmetricEigen symmetric_eigen(const Matrix& a, double tolerance = 1e-15,
                               int max_sweeps = 100);

/// Determinant by partial-pivot LU.
double determinant(const Matrix& a);

/// Inverse by Gauss-Jordan with partial pivoting; throws ContractError
/// when a pivot vanishes.
Matrix inverse(const Matrix& a);

}  // namespace bss::linalg
