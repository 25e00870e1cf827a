#pragma once

// Independent reference solvers used by the test suites and `bss selftest`.
// Nothing here shares code with the iterative PCA / FastICA paths they check.

#include <cstddef>
#include <cstdint>
#include <span>

#include "bss/matrix.hpp"
#include "bss/signal_gen.hpp"

namespace bss::oracle {

/// Eigenvalues of a symmetric matrix, descending: Householder reduction to
/// tridiagonal form, then Sturm-sequence bisection for each eigenvalue.
Vector eigenvalues(const Matrix& a);

/// Unit eigenvector for a (simple) eigenvalue by inverse iteration with a
/// partial-pivot Gaussian elimination solve.
Vector eigenvector(const Matrix& a, double eigenvalue);

struct RotationOptimum {
  double angle;      // in [0, pi)
  double objective;  // summed negentropy estimate at `angle`
};

/// Exhaustive search over `grid` equally spaced rotation angles in [0, pi)
/// for the 2-D whitened sample z, maximizing
///   sum_k (mean log cosh(y_k) - E[log cosh U])^2
/// with y = z * [[cos, -sin], [sin, cos]].
RotationOptimum rotation_grid(const SignalMatrix& z, std::size_t grid = 10000);

/// E[log cosh U], U ~ N(0, 1), by composite Simpson quadrature on [-14, 14].
double log_cosh_gauss_baseline();

/// Angle of the first column of a 2x2 demixing matrix.
double demixing_angle(const Matrix& w);

/// Distance between two demixing angles modulo pi/2 (column order and sign
/// are unidentifiable).
double angle_distance(double a, double b);

/// Two-column sample whose rows are all pairs (a_i, b_j): its empirical
/// joint law is exactly the product of the marginals.
SignalMatrix product_sample(std::span<const double> a, std::span<const double> b);

enum class Marginal { Sine, Uniform, Laplace, Gaussian };

/// n draws from a unit-scale marginal: sine at a random frequency and
/// phase, uniform on [-1, 1], Laplace(0, 1) or N(0, 1).
Vector draw_marginal(Marginal kind, std::size_t n, std::uint64_t seed);

/// (mean log cosh(u) - E[log cosh U])^2 of the standardized sample u.
double sample_negentropy(std::span<const double> v);

/// Non-gaussian marginals in ica_case are redrawn until their sample
/// negentropy reaches this value.
inline constexpr double kMinCaseNegentropy = 2.5e-4;

struct IcaCase {
  Marginal first;
  Marginal second;  // never both Gaussian
  Matrix mixing;    // 2x2, |det| >= 0.2
  SignalMatrix mixed;
};

/// Random 2-source test mixture: product_sample of two marginals of
/// `side` draws each (T = side^2), times a random gaussian mixing matrix.
IcaCase ica_case(std::uint64_t seed, std::size_t side = 40);

/// Random symmetric positive definite n x n matrix with eigenvalues drawn
/// log-uniformly from [0.1, 10].
Matrix random_spd(std::size_t n, std::uint64_t seed);

}  // namespace bss::oracle
