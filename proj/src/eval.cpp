#include "bss/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bss/errors.hpp"

namespace bss {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ColumnStats {
  double mean;
  double sd;  // population
  bool constant;
};

std::vector<ColumnStats> column_stats(const Matrix& x) {
  const std::size_t t_count = x.rows();
  const double inv_t = 1.0 / static_cast<double>(t_count);
  std::vector<ColumnStats> stats(x.cols());
  double reference = 0.0;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t t = 0; t < t_count; ++t) {
      sum += x(t, c);
      sq += x(t, c) * x(t, c);
    }
    const double mean = sum * inv_t;
    double ss = 0.0;
    for (std::size_t t = 0; t < t_count; ++t) ss += (x(t, c) - mean) * (x(t, c) - mean);
    stats[c] = {mean, std::sqrt(ss * inv_t), false};
    reference = std::max(reference, std::sqrt(sq * inv_t));
  }
  for (auto& s : stats) s.constant = s.sd <= kConstantColumnRatio * reference;
  return stats;
}

// rmse between sign * a and b, both standardized columns
double column_rmse(const Matrix& a, std::size_t ca, int sign, const Matrix& b, std::size_t cb) {
  double ss = 0.0;
  for (std::size_t t = 0; t < a.rows(); ++t) {
    const double d = sign * a(t, ca) - b(t, cb);
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(a.rows()));
}

void check_same_shape(const SignalMatrix& a, const SignalMatrix& b) {
  if (a.t_count() != b.t_count() || a.channels() != b.channels())
    throw ShapeError("estimated and true signals differ in shape");
}

}  // namespace

double EvaluationReport::total_rmse() const {
  return std::accumulate(rmse.begin(), rmse.end(), 0.0);
}

Matrix standardize(const Matrix& x) {
  const auto stats = column_stats(x);
  Matrix out(x.rows(), x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    if (stats[c].constant) continue;
    for (std::size_t t = 0; t < x.rows(); ++t)
      out(t, c) = (x(t, c) - stats[c].mean) / stats[c].sd;
  }
  return out;
}

Alignment align(const SignalMatrix& estimated, const SignalMatrix& truth) {
  check_same_shape(estimated, truth);
  const std::size_t n = truth.channels();
  if (n > kMaxAlignChannels)
    throw UnsupportedSizeError("align: exhaustive search supports at most 8 channels");

  const Matrix est = standardize(estimated.data());
  const Matrix tru = standardize(truth.data());

  // best_cost[i * n + j]: estimated i against true j under its better sign.
  // The total separates over columns, so the 2^N sign patterns collapse to
  // a per-pair minimum.
  std::vector<double> best_cost(n * n);
  std::vector<int> best_sign(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double plus = column_rmse(est, i, +1, tru, j);
      const double minus = column_rmse(est, i, -1, tru, j);
      best_cost[i * n + j] = minus < plus ? minus : plus;
      best_sign[i * n + j] = minus < plus ? -1 : +1;
    }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> best_perm = perm;
  double best_total = std::numeric_limits<double>::infinity();
  do {
    // summed in true-column order so relabeling the estimate is exact
    std::vector<double> by_true(n);
    for (std::size_t i = 0; i < n; ++i) by_true[perm[i]] = best_cost[i * n + perm[i]];
    const double total = std::accumulate(by_true.begin(), by_true.end(), 0.0);
    if (total < best_total) {
      best_total = total;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  const auto est_stats = column_stats(estimated.data());
  const auto tru_stats = column_stats(truth.data());
  Alignment a{best_perm, std::vector<int>(n), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = best_perm[i];
    a.signs[i] = best_sign[i * n + j];
    a.scales[i] = (est_stats[i].constant || tru_stats[j].constant)
                      ? 1.0
                      : est_stats[i].sd / tru_stats[j].sd;
  }
  return a;
}

Matrix apply_alignment(const SignalMatrix& estimated, const Alignment& alignment) {
  const std::size_t n = estimated.channels();
  if (alignment.permutation.size() != n || alignment.signs.size() != n)
    throw ShapeError("apply_alignment: alignment size mismatch");
  const Matrix est = standardize(estimated.data());
  Matrix aligned(est.rows(), n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = alignment.permutation[i];
    for (std::size_t t = 0; t < est.rows(); ++t) aligned(t, j) = alignment.signs[i] * est(t, i);
  }
  return aligned;
}

EvaluationReport rmse_report(const SignalMatrix& estimated, const SignalMatrix& truth) {
  EvaluationReport report;
  report.alignment = align(estimated, truth);

  const std::size_t n = truth.channels();
  const Matrix est = standardize(estimated.data());
  const Matrix tru = standardize(truth.data());
  report.rmse.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = report.alignment.permutation[i];
    report.rmse[j] = column_rmse(est, i, report.alignment.signs[i], tru, j);
  }

  if (estimated.t_count() >= 4) {
    auto d = diagnostics(SignalMatrix(apply_alignment(estimated, report.alignment),
                                      Provenance::Estimated));
    report.correlation = std::move(d.correlation);
    report.kurtosis = std::move(d.kurtosis);
  }
  return report;
}

Diagnostics diagnostics(const SignalMatrix& x) {
  if (x.t_count() < 4) throw ShapeError("diagnostics: need at least 4 samples");
  const std::size_t n = x.channels();
  const Matrix z = standardize(x.data());
  const auto stats = column_stats(x.data());
  const double inv_t = 1.0 / static_cast<double>(x.t_count());

  Diagnostics d{Matrix(n, n), Vector(n, kNaN)};
  for (std::size_t i = 0; i < n; ++i) {
    if (stats[i].constant) continue;
    for (std::size_t j = i; j < n; ++j) {
      if (stats[j].constant) continue;
      double s = 0.0;
      for (std::size_t t = 0; t < z.rows(); ++t) s += z(t, i) * z(t, j);
      const double r = i == j ? 1.0 : std::clamp(s * inv_t, -1.0, 1.0);
      d.correlation(i, j) = r;
      d.correlation(j, i) = r;
    }
    double m4 = 0.0;
    for (std::size_t t = 0; t < z.rows(); ++t) {
      const double v = z(t, i) * z(t, i);
      m4 += v * v;
    }
    d.kurtosis[i] = m4 * inv_t - 3.0;
  }
  return d;
}

EvaluationReport degenerate_report(std::size_t channels, std::string message) {
  EvaluationReport r;
  r.rmse.assign(channels, kNaN);
  r.kurtosis.assign(channels, kNaN);
  r.correlation = Matrix(channels, channels, kNaN);
  r.degenerate = true;
  r.message = std::move(message);
  return r;
}

nlohmann::ordered_json to_json(const EvaluationReport& report) {
  using json = nlohmann::ordered_json;
  // NaN has no JSON literal; undefined values are written as null
  auto number = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };

  json rmse = json::array();
  for (double v : report.rmse) rmse.push_back(number(v));
  json kurt = json::array();
  for (double v : report.kurtosis) kurt.push_back(number(v));
  json corr = json::array();
  for (std::size_t i = 0; i < report.correlation.rows(); ++i) {
    json row = json::array();
    for (double v : report.correlation.row(i)) row.push_back(number(v));
    corr.push_back(std::move(row));
  }
  json params = json::object();
  for (const auto& [k, v] : report.params) params[k] = number(v);

  json out;
  out["method"] = report.method;
  out["scenario"] = report.scenario;
  out["seed"] = report.seed;
  out["params"] = std::move(params);
  out["rmse_per_source"] = std::move(rmse);
  out["correlation"] = std::move(corr);
  out["kurtosis"] = std::move(kurt);
  out["degenerate"] = report.degenerate;
  if (!report.message.empty()) out["message"] = report.message;
  if (!report.alignment.permutation.empty()) {
    json scales = json::array();
    for (double v : report.alignment.scales) scales.push_back(number(v));
    out["alignment"] = {{"permutation", report.alignment.permutation},
                        {"signs", report.alignment.signs},
                        {"scales", std::move(scales)}};
  }
  return out;
}

}  // namespace bss
