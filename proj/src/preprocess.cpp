#include "bss/preprocess.hpp"

#include <cmath>

#include "bss/errors.hpp"
#include "bss/linalg.hpp"
#include "bss/sign.hpp"

namespace bss {
namespace {

Vector column_means(const Matrix& x) {
  Vector mean(x.cols(), 0.0);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto r = x.row(t);
    for (std::size_t c = 0; c < x.cols(); ++c) mean[c] += r[c];
  }
  for (auto& m : mean) m /= static_cast<double>(x.rows());
  return mean;
}

void subtract_row(Matrix& x, const Vector& v) {
  for (std::size_t t = 0; t < x.rows(); ++t) {
    auto r = x.row(t);
    for (std::size_t c = 0; c < x.cols(); ++c) r[c] -= v[c];
  }
}

}  // namespace

Centered center(const SignalMatrix& x) {
  Matrix data = x.data();
  Vector mean = column_means(data);
  subtract_row(data, mean);
  // second pass removes the rounding residue of the first
  const Vector residue = column_means(data);
  subtract_row(data, residue);
  for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += residue[c];
  return {SignalMatrix(std::move(data), Provenance::Centered), std::move(mean)};
}

Matrix sample_covariance(const SignalMatrix& x) {
  const Matrix& d = x.data();
  const Vector mean = column_means(d);
  for (std::size_t c = 0; c < mean.size(); ++c)
    if (std::abs(mean[c]) > kCenteredTolerance)
      throw ContractError("sample_covariance: column " + std::to_string(c) +
                          " is not centered");

  const std::size_t n = d.cols();
  Matrix cov(n, n);
  for (std::size_t t = 0; t < d.rows(); ++t) {
    const auto r = d.row(t);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) cov(i, j) += r[i] * r[j];
  }
  const double scale = 1.0 / static_cast<double>(d.rows() - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      cov(i, j) *= scale;
      cov(j, i) = cov(i, j);
    }
  return cov;
}

SignalMatrix WhiteningTransform::apply(const SignalMatrix& x) const {
  if (x.channels() != mean.size()) throw ShapeError("whitening transform: channel count mismatch");
  Matrix centered = x.data();
  subtract_row(centered, mean);
  return SignalMatrix(centered * m.transpose(), Provenance::Whitened);
}

Whitened whiten(const SignalMatrix& x) {
  Centered c = center(x);
  Matrix sigma = sample_covariance(c.x);
  auto eig = linalg::symmetric_eigen(sigma);
  const std::size_t n = sigma.rows();

  const double largest = eig.values.front();
  const double floor = kEigenvalueFloorRatio * largest;
  for (std::size_t j = 0; j < n; ++j)
    if (!(eig.values[j] > floor) || !(largest > 0.0))
      throw SingularCovarianceError(j, eig.values[j], floor);

  canonicalize_column_signs(eig.vectors);

  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = 1.0 / std::sqrt(eig.values[i]);
    for (std::size_t k = 0; k < n; ++k) m(i, k) = s * eig.vectors(k, i);
  }

  WhiteningTransform transform{std::move(c.mean), std::move(m), std::move(sigma)};
  SignalMatrix z(c.x.data() * transform.m.transpose(), Provenance::Whitened);
  return {std::move(z), std::move(transform)};
}

}  // namespace bss
