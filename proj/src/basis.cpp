#include "bss/basis.hpp"

#include <algorithm>
#include <cmath>

namespace bss {

bool ComponentBasis::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

double orthonormality_error(const Matrix& w) {
  const Matrix g = w.transpose() * w;
  return max_abs_diff(g, Matrix::identity(g.rows()));
}

void project_out(std::span<double> v, const Matrix& w, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    double proj = 0.0;
    for (std::size_t r = 0; r < v.size(); ++r) proj += v[r] * w(r, i);
    for (std::size_t r = 0; r < v.size(); ++r) v[r] -= proj * w(r, i);
  }
}

Vector random_unit_vector(std::size_t n, Rng& rng) {
  Vector v(n);
  double len = 0.0;
  while (len == 0.0) {
    for (auto& x : v) x = rng.normal();
    len = norm(v);
  }
  for (auto& x : v) x /= len;
  return v;
}

}  // namespace bss
