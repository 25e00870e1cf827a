#pragma once

#include <cmath>
#include <span>

#include "bss/matrix.hpp"

namespace bss {

/// Flips v so its largest-magnitude entry is positive (first one wins ties).
inline void canonicalize_sign(std::span<double> v) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  if (!v.empty() && v[arg] < 0.0)
    for (auto& x : v) x = -x;
}

inline void canonicalize_column_signs(Matrix& w) {
  for (std::size_t c = 0; c < w.cols(); ++c) {
    Vector col = w.column(c);
    canonicalize_sign(col);
    w.set_column(c, col);
  }
}

}  // namespace bss
