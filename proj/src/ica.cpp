#include "bss/ica.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "bss/errors.hpp"
#include "bss/rng.hpp"
#include "bss/sign.hpp"

namespace bss {
namespace {

double log_cosh(double y) {
  const double a = std::abs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}
double tanh_fn(double y) { return std::tanh(y); }
double sech2(double y) {
  const double t = std::tanh(y);
  return 1.0 - t * t;
}

void check_options(const IterationOptions& opts) {
  if (!(opts.tolerance > 0.0) || opts.max_iterations < 1)
    throw ParameterError("iteration options: tolerance must be > 0 and max_iterations >= 1");
}

void check_whitened(const SignalMatrix& x) {
  const Matrix& d = x.data();
  const std::size_t n = d.cols();
  Vector mean(n, 0.0);
  Matrix cov(n, n);
  for (std::size_t t = 0; t < d.rows(); ++t) {
    const auto r = d.row(t);
    for (std::size_t i = 0; i < n; ++i) {
      mean[i] += r[i];
      for (std::size_t j = 0; j < n; ++j) cov(i, j) += r[i] * r[j];
    }
  }
  const double inv_t = 1.0 / static_cast<double>(d.rows());
  const double inv_t1 = 1.0 / static_cast<double>(d.rows() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(mean[i] * inv_t) > kWhitenedTolerance)
      throw ContractError("ica: input column " + std::to_string(i) + " is not centered");
    for (std::size_t j = 0; j < n; ++j) {
      const double target = i == j ? 1.0 : 0.0;
      if (std::abs(cov(i, j) * inv_t1 - target) > kWhitenedTolerance)
        throw ContractError("ica: input is not whitened (covariance differs from identity)");
    }
  }
}

Vector project(const SignalMatrix& x, std::span<const double> w) { return x.data() * w; }

}  // namespace

ContrastFunction ContrastFunction::log_cosh() {
  return {"logcosh", &bss::log_cosh, &tanh_fn, &sech2, kLogCoshGaussBaseline};
}

NegentropyEstimate negentropy(std::span<const double> y, const ContrastFunction& contrast) {
  if (y.size() < 2) throw ShapeError("negentropy: need at least 2 samples");
  const double n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double var = ss / (n - 1.0);
  if (std::abs(mean) > kWhitenedTolerance || std::abs(var - 1.0) > kWhitenedTolerance)
    throw ContractError("negentropy: input is not standardized");

  double acc = 0.0;
  for (double v : y) acc += contrast.big_phi(v);
  const double gap = acc / n - contrast.gauss_baseline;
  return {gap * gap, contrast.gauss_baseline};
}

Vector fixed_point_update(const SignalMatrix& x_white, std::span<const double> w,
                          const ContrastFunction& contrast) {
  const std::size_t n = x_white.channels();
  if (w.size() != n) throw ShapeError("fixed_point_update: weight length mismatch");
  const Matrix& d = x_white.data();

  double mean_phi_prime = 0.0;
  Vector mean_x_phi(n, 0.0);
  for (std::size_t t = 0; t < d.rows(); ++t) {
    const auto r = d.row(t);
    const double y = dot(r, w);
    mean_phi_prime += contrast.phi_prime(y);
    const double g = contrast.phi(y);
    for (std::size_t i = 0; i < n; ++i) mean_x_phi[i] += r[i] * g;
  }
  const double inv_t = 1.0 / static_cast<double>(d.rows());
  Vector next(n);
  for (std::size_t i = 0; i < n; ++i)
    next[i] = mean_phi_prime * inv_t * w[i] - mean_x_phi[i] * inv_t;
  return next;
}

GramSchmidtStep gram_schmidt_step(std::span<const double> alpha, const Matrix& previous,
                                  std::size_t k) {
  if (alpha.size() != previous.rows()) throw ShapeError("gram_schmidt_step: size mismatch");
  if (k > previous.cols()) throw ShapeError("gram_schmidt_step: k exceeds available columns");
  Vector theta(alpha.begin(), alpha.end());
  project_out(theta, previous, k);
  const double len = norm(theta);
  if (len < kDeflationFloor)
    throw DegenerateDeflationError("Gram-Schmidt remainder vanished for component " +
                                   std::to_string(k));
  Vector w = theta;
  for (auto& v : w) v /= len;
  return {std::move(theta), std::move(w)};
}

ComponentBasis ica_fit(const SignalMatrix& x_white, const ContrastFunction& contrast,
                       IterationOptions opts, std::uint64_t seed) {
  check_options(opts);
  const std::size_t n = x_white.channels();
  if (n < 2) throw ShapeError("ica: need at least 2 channels");
  check_whitened(x_white);

  Matrix w(n, n);
  std::vector<int> iterations(n), restarts(n);
  std::vector<bool> converged(n);

  for (std::size_t j = 0; j < n; ++j) {
    Rng rng(stream_seed(seed, static_cast<std::uint64_t>(Stream::kIcaInit) + j));
    Vector best;
    for (int attempt = 0; attempt < 2; ++attempt) {
      Vector v = gram_schmidt_step(random_unit_vector(n, rng), w, j).w;
      bool done = false;
      int it = 0;
      while (it < opts.max_iterations && !done) {
        ++it;
        const Vector alpha = fixed_point_update(x_white, v, contrast);
        Vector next = gram_schmidt_step(alpha, w, j).w;
        done = 1.0 - std::abs(dot(v, next)) < opts.tolerance;
        v = std::move(next);
      }
      best = std::move(v);
      iterations[j] = it;
      restarts[j] = attempt;
      converged[j] = done;
      if (done) break;
    }
    w.set_column(j, best);
  }

  Vector neg(n);
  for (std::size_t j = 0; j < n; ++j)
    neg[j] = negentropy(project(x_white, w.column(j)), contrast).value;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return neg[a] > neg[b]; });

  ComponentBasis basis;
  basis.w = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    Vector col = w.column(order[k]);
    canonicalize_sign(col);
    basis.w.set_column(k, col);
    basis.negentropy.push_back(neg[order[k]]);
    basis.iterations.push_back(iterations[order[k]]);
    basis.restarts.push_back(restarts[order[k]]);
    basis.converged.push_back(converged[order[k]]);
  }
  return basis;
}

SignalMatrix ica_transform(const SignalMatrix& x_white, const ComponentBasis& basis) {
  if (basis.components() != basis.dimension())
    throw ShapeError("ica_transform: basis is not square");
  if (x_white.channels() != basis.dimension())
    throw ShapeError("ica_transform: channel count mismatch");
  return SignalMatrix(x_white.data() * basis.w, Provenance::Estimated);
}

}  // namespace bss
