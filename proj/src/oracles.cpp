#include "bss/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bss/errors.hpp"
#include "bss/rng.hpp"

namespace bss::oracle {
namespace {

struct Tridiagonal {
  Vector diag;
  Vector off;  // off[i] couples i and i + 1
};

Tridiagonal householder_tridiagonal(Matrix a) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    Vector v(n, 0.0);
    double len = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) len += a(i, k) * a(i, k);
    len = std::sqrt(len);
    if (len == 0.0) continue;
    const double alpha = a(k + 1, k) > 0.0 ? -len : len;
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] -= alpha;
    double vlen = 0.0;
    for (double x : v) vlen += x * x;
    vlen = std::sqrt(vlen);
    if (vlen == 0.0) continue;
    for (auto& x : v) x /= vlen;

    // A <- P A P with P = I - 2 v v^T
    Vector av(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) av[i] += a(i, j) * v[j];
    double vav = 0.0;
    for (std::size_t i = 0; i < n; ++i) vav += v[i] * av[i];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a(i, j) += -2.0 * v[i] * av[j] - 2.0 * av[i] * v[j] + 4.0 * vav * v[i] * v[j];
  }
  Tridiagonal t{Vector(n), Vector(n > 0 ? n - 1 : 0)};
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = a(i, i);
  for (std::size_t i = 0; i + 1 < n; ++i) t.off[i] = 0.5 * (a(i, i + 1) + a(i + 1, i));
  return t;
}

// Number of eigenvalues strictly below x.
std::size_t sturm_count(const Tridiagonal& t, double x) {
  const double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = t.diag[0] - x;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < t.diag.size(); ++i) {
    if (q == 0.0) q = tiny;
    q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
    if (q < 0.0) ++count;
  }
  return count;
}

Vector solve(Matrix a, Vector b) {
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(p, col))) p = r;
    for (std::size_t k = 0; k < n; ++k) std::swap(a(p, k), a(col, k));
    std::swap(b[p], b[col]);
    if (a(col, col) == 0.0) a(col, col) = 1e-300;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (std::size_t k = col; k < n; ++k) a(r, k) -= f * a(col, k);
      b[r] -= f * b[col];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a(i, k) * x[k];
    x[i] = s / a(i, i);
  }
  return x;
}

double log_cosh(double y) { return std::log(std::cosh(y)); }

}  // namespace

double sample_negentropy(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / n);
  double acc = 0.0;
  for (double x : v) acc += log_cosh((x - mean) / sd);
  const double d = acc / n - log_cosh_gauss_baseline();
  return d * d;
}

Vector eigenvalues(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw ShapeError("oracle: matrix must be square");
  const std::size_t n = a.rows();
  const Tridiagonal t = householder_tridiagonal(a);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(t.off[i - 1]);
    if (i + 1 < n) radius += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - radius);
    hi = std::max(hi, t.diag[i] + radius);
  }
  const double pad = 1e-12 * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  lo -= pad;
  hi += pad;

  Vector values(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k-th smallest: smallest x with sturm_count(x) > k
    double a_lo = lo, a_hi = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a_lo + a_hi);
      if (mid == a_lo || mid == a_hi) break;
      if (sturm_count(t, mid) > k)
        a_hi = mid;
      else
        a_lo = mid;
    }
    values[n - 1 - k] = 0.5 * (a_lo + a_hi);
  }
  return values;
}

Vector eigenvector(const Matrix& a, double eigenvalue) {
  const std::size_t n = a.rows();
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  Matrix shifted = a;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= eigenvalue + 1e-10 * scale;

  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
  for (int it = 0; it < 4; ++it) {
    v = solve(shifted, v);
    double len = 0.0;
    for (double x : v) len += x * x;
    len = std::sqrt(len);
    for (auto& x : v) x /= len;
  }
  return v;
}

double log_cosh_gauss_baseline() {
  static const double value = [] {
    constexpr int kIntervals = 40000;
    constexpr double kLo = -14.0, kHi = 14.0;
    const double h = (kHi - kLo) / kIntervals;
    auto f = [](double u) {
      return log_cosh(u) * std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    };
    double s = f(kLo) + f(kHi);
    for (int i = 1; i < kIntervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(kLo + i * h);
    return s * h / 3.0;
  }();
  return value;
}

RotationOptimum rotation_grid(const SignalMatrix& z, std::size_t grid) {
  if (z.channels() != 2) throw ShapeError("rotation oracle: need exactly 2 channels");
  if (grid < 2 || grid % 2 != 0) throw ParameterError("rotation oracle: grid must be even");
  const double gamma = log_cosh_gauss_baseline();
  const std::size_t t_count = z.t_count();

  // f[k] = mean log cosh of the projection on angle k * pi / grid.
  // The second demixed channel at angle theta is (minus) the projection at
  // theta + pi/2, i.e. index k + grid / 2 modulo grid.
  Vector f(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    const double theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid);
    const double c = std::cos(theta), s = std::sin(theta);
    double acc = 0.0;
    for (std::size_t t = 0; t < t_count; ++t) acc += log_cosh(c * z(t, 0) + s * z(t, 1));
    f[k] = acc / static_cast<double>(t_count);
  }

  RotationOptimum best{0.0, -1.0};
  for (std::size_t k = 0; k < grid; ++k) {
    const double g1 = f[k] - gamma;
    const double g2 = f[(k + grid / 2) % grid] - gamma;
    const double obj = g1 * g1 + g2 * g2;
    if (obj > best.objective)
      best = {std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid), obj};
  }
  return best;
}

double demixing_angle(const Matrix& w) {
  if (w.rows() != 2 || w.cols() != 2) throw ShapeError("demixing_angle: need a 2x2 matrix");
  return std::atan2(w(1, 0), w(0, 0));
}

double angle_distance(double a, double b) {
  const double quarter = std::numbers::pi / 2.0;
  const double d = std::fmod(std::abs(a - b), quarter);
  return std::min(d, quarter - d);
}

SignalMatrix product_sample(std::span<const double> a, std::span<const double> b) {
  Matrix m(a.size() * b.size(), 2);
  std::size_t row = 0;
  for (double x : a)
    for (double y : b) {
      m(row, 0) = x;
      m(row, 1) = y;
      ++row;
    }
  return SignalMatrix(std::move(m), Provenance::Source);
}

Vector draw_marginal(Marginal kind, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  switch (kind) {
    case Marginal::Sine: {
      const double freq = 0.05 + 0.15 * rng.uniform();
      const double phase = 2.0 * std::numbers::pi * rng.uniform();
      for (std::size_t i = 0; i < n; ++i)
        v[i] = std::sin(freq * static_cast<double>(i + 1) + phase);
      break;
    }
    case Marginal::Uniform:
      for (auto& x : v) x = 2.0 * rng.uniform() - 1.0;
      break;
    case Marginal::Laplace:
      for (auto& x : v) {
        const double u = rng.uniform() - 0.5;
        x = (u < 0.0 ? 1.0 : -1.0) * std::log1p(-2.0 * std::abs(u));
      }
      break;
    case Marginal::Gaussian:
      for (auto& x : v) x = rng.normal();
      break;
  }
  return v;
}

IcaCase ica_case(std::uint64_t seed, std::size_t side) {
  Rng rng(seed);
  constexpr Marginal kinds[] = {Marginal::Sine, Marginal::Uniform, Marginal::Laplace,
                                Marginal::Gaussian};
  const auto pick = [&] { return kinds[rng.next_u64() % 4]; };
  Marginal a = pick();
  Marginal b = pick();
  while (a == Marginal::Gaussian && b == Marginal::Gaussian) b = pick();

  Matrix mixing(2, 2);
  do {
    for (std::size_t i = 0; i < 4; ++i) mixing(i / 2, i % 2) = rng.normal();
  } while (std::abs(mixing(0, 0) * mixing(1, 1) - mixing(0, 1) * mixing(1, 0)) < 0.2);

  // A short non-gaussian draw can look gaussian to the contrast; redraw it.
  auto draw = [&](Marginal kind) {
    Vector v = draw_marginal(kind, side, rng.next_u64());
    while (kind != Marginal::Gaussian && sample_negentropy(v) < kMinCaseNegentropy)
      v = draw_marginal(kind, side, rng.next_u64());
    return v;
  };
  const Vector sa = draw(a);
  const Vector sb = draw(b);
  const SignalMatrix s = product_sample(sa, sb);
  return {a, b, mixing, SignalMatrix(s.data() * mixing, Provenance::Mixed)};
}

Matrix random_spd(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  // orthonormal Q from Gram-Schmidt on a gaussian matrix
  Matrix q(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    Vector v(n);
    for (auto& x : v) x = rng.normal();
    for (std::size_t p = 0; p < c; ++p) {
      double d = 0.0;
      for (std::size_t r = 0; r < n; ++r) d += v[r] * q(r, p);
      for (std::size_t r = 0; r < n; ++r) v[r] -= d * q(r, p);
    }
    double len = 0.0;
    for (double x : v) len += x * x;
    len = std::sqrt(len);
    for (std::size_t r = 0; r < n; ++r) q(r, c) = v[r] / len;
  }
  Vector lambda(n);
  for (auto& l : lambda) l = 0.1 * std::pow(100.0, rng.uniform());

  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += q(i, k) * lambda[k] * q(j, k);
      out(i, j) = s;
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out(j, i) = out(i, j);
  return out;
}

}  // namespace bss::oracle
