#include "bss/pca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bss/errors.hpp"
#include "bss/preprocess.hpp"
#include "bss/rng.hpp"
#include "bss/sign.hpp"

namespace bss {
namespace {

void check_options(const IterationOptions& opts) {
  if (!(opts.tolerance > 0.0) || opts.max_iterations < 1)
    throw ParameterError("iteration options: tolerance must be > 0 and max_iterations >= 1");
}

double rayleigh(const Matrix& a, std::span<const double> v) { return dot(v, a * v); }

// |A v - (v^T A v) v|
double residual(const Matrix& a, std::span<const double> v) {
  Vector av = a * v;
  const double lambda = dot(v, av);
  for (std::size_t i = 0; i < av.size(); ++i) av[i] -= lambda * v[i];
  return norm(av);
}

}  // namespace

ComponentBasis pca_fit_covariance(const Matrix& sigma, std::size_t m, IterationOptions opts,
                                  std::uint64_t seed) {
  check_options(opts);
  if (sigma.rows() != sigma.cols()) throw ShapeError("pca: covariance must be square");
  const std::size_t n = sigma.rows();
  if (m < 1 || m > n) throw ShapeError("pca: component count must lie in [1, N]");

  // Below this, deflated * v is rounding noise: the remaining spectrum is zero.
  const double sigma_norm = std::sqrt(frobenius_norm_squared(sigma));
  const double null_threshold =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * sigma_norm;
  // Residuals are taken against the original sigma, so a column that only
  // solves a deflated matrix spoiled by an earlier unconverged column never
  // counts as converged.
  const double residual_limit = opts.tolerance * std::max(1.0, sigma_norm);

  Matrix deflated = sigma;
  Matrix w(n, m);
  Vector eigenvalues(m);
  std::vector<int> iterations(m);
  std::vector<bool> converged(m);

  for (std::size_t j = 0; j < m; ++j) {
    Rng rng(stream_seed(seed, static_cast<std::uint64_t>(Stream::kPcaInit) + j));
    Vector v = random_unit_vector(n, rng);
    project_out(v, w, j);
    const double init_len = norm(v);
    for (auto& x : v) x /= init_len;

    bool done = false;
    int it = 0;
    while (it < opts.max_iterations && !done) {
      ++it;
      Vector next = deflated * v;
      // keeps rounding drift from re-introducing earlier directions
      project_out(next, w, j);
      const double len = norm(next);
      if (len <= null_threshold) {
        done = true;
        break;
      }
      double plus = 0.0, minus = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        next[r] /= len;
        plus += (next[r] - v[r]) * (next[r] - v[r]);
        minus += (next[r] + v[r]) * (next[r] + v[r]);
      }
      v = std::move(next);
      done = std::sqrt(std::min(plus, minus)) < opts.tolerance &&
             residual(sigma, v) < residual_limit;
    }

    w.set_column(j, v);
    iterations[j] = it;
    converged[j] = done;
    eigenvalues[j] = std::max(0.0, rayleigh(sigma, v));

    const double lambda_deflated = rayleigh(deflated, v);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) deflated(r, c) -= lambda_deflated * v[r] * v[c];
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return eigenvalues[a] > eigenvalues[b];
  });

  ComponentBasis basis;
  basis.w = Matrix(n, m);
  for (std::size_t k = 0; k < m; ++k) {
    Vector col = w.column(order[k]);
    canonicalize_sign(col);
    basis.w.set_column(k, col);
    basis.eigenvalues.push_back(eigenvalues[order[k]]);
    basis.iterations.push_back(iterations[order[k]]);
    basis.converged.push_back(converged[order[k]]);
  }
  return basis;
}

ComponentBasis pca_fit(const SignalMatrix& x, std::size_t m, IterationOptions opts,
                       std::uint64_t seed) {
  return pca_fit_covariance(sample_covariance(x), m, opts, seed);
}

SignalMatrix pca_project(const SignalMatrix& x, const ComponentBasis& basis) {
  if (x.channels() != basis.dimension()) throw ShapeError("pca_project: channel count mismatch");
  return SignalMatrix(x.data() * basis.w, Provenance::Estimated);
}

double reconstruction_error(const SignalMatrix& x, const ComponentBasis& basis) {
  if (x.channels() != basis.dimension())
    throw ShapeError("reconstruction_error: channel count mismatch");
  const Matrix reconstructed = (x.data() * basis.w) * basis.w.transpose();
  return frobenius_norm_squared(x.data() - reconstructed) / static_cast<double>(x.t_count());
}

}  // namespace bss
