#include "bss/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "bss/ica.hpp"
#include "bss/pca.hpp"
#include "bss/preprocess.hpp"

namespace bss {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void write_file(const std::filesystem::path& path, const std::string& content, bool force) {
  if (!force && std::filesystem::exists(path))
    throw OutputExistsError(path.string() + " exists (pass --force to overwrite)");
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

// free text inside a CSV cell: no separators or line breaks
std::string csv_cell(std::string text) {
  for (char& c : text)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return text;
}

std::string fixed3(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void fill_metadata(EvaluationReport& r, const char* method, const ScenarioConfig& cfg,
                   double mixed_corr) {
  r.method = method;
  r.scenario = std::string(to_string(cfg.name));
  r.seed = cfg.seed;
  r.params["t"] = static_cast<double>(cfg.t_count);
  r.params["n"] = static_cast<double>(cfg.sources.size());
  r.params["sigma"] = cfg.sigma();
  r.params["mixed_corr"] = mixed_corr;
}

}  // namespace

std::string_view to_string(ScenarioName name) {
  switch (name) {
    case ScenarioName::IcaWins: return "ica-wins";
    case ScenarioName::Similar: return "similar";
    case ScenarioName::PcaWins: return "pca-wins";
    case ScenarioName::Custom: return "custom";
  }
  return "?";
}

std::optional<ScenarioName> parse_scenario_name(std::string_view text) {
  for (auto n : {ScenarioName::IcaWins, ScenarioName::Similar, ScenarioName::PcaWins,
                 ScenarioName::Custom})
    if (text == to_string(n)) return n;
  return std::nullopt;
}

ScenarioConfig ScenarioConfig::preset(ScenarioName name, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.seed = seed;
  switch (name) {
    case ScenarioName::IcaWins:
      cfg.sources = {SourceSpec::sine(), SourceSpec::gaussian(kIcaWinsSigma)};
      break;
    case ScenarioName::Similar:
      cfg.sources = {SourceSpec::sine(), SourceSpec::gaussian(kSimilarSigma)};
      break;
    case ScenarioName::PcaWins:
      cfg.sources = {SourceSpec::line(), SourceSpec::gaussian(kPcaWinsSigma)};
      break;
    case ScenarioName::Custom:
      cfg.sources = {SourceSpec::sine(), SourceSpec::gaussian(1.0)};
      break;
  }
  return cfg;
}

void ScenarioConfig::set_sigma(double sigma) {
  for (auto& s : sources)
    if (s.kind == SourceKind::GaussianNoise) s.sigma = sigma;
}

double ScenarioConfig::sigma() const {
  for (const auto& s : sources)
    if (s.kind == SourceKind::GaussianNoise) return s.sigma;
  return kNaN;
}

void ScenarioConfig::validate() const {
  if (t_count < 2) throw ParameterError("scenario: t must be >= 2");
  if (sources.empty()) throw ParameterError("scenario: no sources");
  for (const auto& s : sources) s.validate();
  if (mixing.rows() != sources.size())
    throw ShapeError("scenario: mixing matrix size differs from source count");
  MixingMatrix check(mixing);
  if (!run_pca && !run_ica) throw ParameterError("scenario: no method selected");
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  const MixingMatrix a(config.mixing);
  SignalMatrix s = generate_sources(config.sources, config.t_count, config.seed);
  SignalMatrix x = mix(s, a);
  const std::size_t n = s.channels();
  const double mixed_corr = n >= 2 && x.t_count() >= 4 ? diagnostics(x).correlation(0, 1) : kNaN;

  ScenarioResult result{config, s, x, mixed_corr, {}, {}, {}, {}};

  if (config.run_pca) {
    try {
      const Centered c = center(x);
      const ComponentBasis basis = pca_fit(c.x, n, IterationOptions::pca_defaults(), config.seed);
      SignalMatrix z = pca_project(c.x, basis);
      EvaluationReport r = rmse_report(z, s);
      r.params["converged"] = basis.all_converged() ? 1.0 : 0.0;
      result.pca = std::move(r);
      result.pca_estimate = std::move(z);
    } catch (const Error& e) {
      result.pca = degenerate_report(n, e.what());
    }
    fill_metadata(*result.pca, "pca", config, mixed_corr);
  }

  if (config.run_ica) {
    try {
      const Whitened w = whiten(x);
      const ComponentBasis basis = ica_fit(w.x, ContrastFunction::log_cosh(),
                                           IterationOptions::ica_defaults(), config.seed);
      SignalMatrix y = ica_transform(w.x, basis);
      EvaluationReport r = rmse_report(y, s);
      r.params["converged"] = basis.all_converged() ? 1.0 : 0.0;
      result.ica = std::move(r);
      result.ica_estimate = std::move(y);
    } catch (const Error& e) {
      result.ica = degenerate_report(n, e.what());
    }
    fill_metadata(*result.ica, "ica", config, mixed_corr);
  }
  return result;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::vector<double>& sigmas,
                            const std::vector<std::uint64_t>& seeds, unsigned jobs) {
  if (sigmas.empty() || seeds.empty()) throw ParameterError("sweep: sigma and seed lists must be nonempty");

  std::vector<SweepRow> rows;
  for (double sg : sigmas)
    for (auto sd : seeds) rows.push_back({sg, sd, std::nullopt, {}});
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.sigma != b.sigma ? a.sigma < b.sigma : a.seed < b.seed;
  });

  auto run_row = [&base](SweepRow& row) {
    try {
      ScenarioConfig cfg = base;
      cfg.seed = row.seed;
      cfg.set_sigma(row.sigma);
      row.result = run_scenario(cfg);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(rows.size())));
  if (jobs == 1) {
    for (auto& row : rows) run_row(row);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (unsigned k = 0; k < jobs; ++k)
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) run_row(rows[i]);
    });
  workers.clear();
  return rows;
}

void write_scenario_outputs(const ScenarioResult& result, const std::filesystem::path& dir,
                            bool force) {
  const std::string name(to_string(result.config.name));
  for (const auto* report : {&result.pca, &result.ica}) {
    if (!report->has_value()) continue;
    const auto& r = **report;
    write_file(dir / ("report_" + name + "_" + r.method + ".json"), to_json(r).dump(2) + "\n",
               force);
  }

  const std::size_t n = result.sources.channels();
  std::optional<Matrix> pca_aligned, ica_aligned;
  if (result.pca_estimate)
    pca_aligned = apply_alignment(*result.pca_estimate, result.pca->alignment);
  if (result.ica_estimate)
    ica_aligned = apply_alignment(*result.ica_estimate, result.ica->alignment);

  std::ostringstream csv;
  csv << 't';
  for (const char* prefix : {"source", "mixed", "pca", "ica"})
    for (std::size_t j = 0; j < n; ++j) csv << ',' << prefix << '_' << (j + 1);
  csv << '\n';
  for (std::size_t t = 0; t < result.sources.t_count(); ++t) {
    csv << (t + 1);
    for (std::size_t j = 0; j < n; ++j) csv << ',' << format_g17(result.sources(t, j));
    for (std::size_t j = 0; j < n; ++j) csv << ',' << format_g17(result.mixed(t, j));
    for (const auto* est : {&pca_aligned, &ica_aligned})
      for (std::size_t j = 0; j < n; ++j)
        csv << ',' << (est->has_value() ? format_g17((**est)(t, j)) : std::string("NA"));
    csv << '\n';
  }
  write_file(dir / ("signals_" + name + ".csv"), csv.str(), force);
}

void write_tables(const std::vector<ScenarioResult>& results, const std::filesystem::path& dir,
                  bool force) {
  std::ostringstream csv;
  csv << "scenario,source,PCA,ICA\n";
  for (const auto& res : results) {
    const std::size_t n = res.sources.channels();
    for (std::size_t j = 0; j < n; ++j) {
      std::string label = n == 2 ? (j == 0 ? "First Source" : "Second Source")
                                 : "Source " + std::to_string(j + 1);
      csv << to_string(res.config.name) << ',' << label << ','
          << (res.pca ? fixed3(res.pca->rmse[j]) : "NA") << ','
          << (res.ica ? fixed3(res.ica->rmse[j]) : "NA") << '\n';
    }
  }
  write_file(dir / "tables.csv", csv.str(), force);
}

void write_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& dir, bool force) {
  std::size_t n = 0;
  for (const auto& r : rows)
    if (r.result) n = std::max(n, r.result->sources.channels());

  std::ostringstream csv;
  csv << "sigma,seed,mixed_corr";
  for (const char* m : {"pca", "ica"})
    for (std::size_t j = 0; j < n; ++j) csv << ',' << m << "_rmse_" << (j + 1);
  csv << ",status\n";
  for (const auto& row : rows) {
    csv << format_g17(row.sigma) << ',' << row.seed << ',';
    if (!row.result) {
      csv << "NA";
      for (std::size_t k = 0; k < 2 * n; ++k) csv << ",NA";
      csv << ",error: " << csv_cell(row.error) << '\n';
      continue;
    }
    const auto& res = *row.result;
    csv << format_g17(res.mixed_correlation);
    std::string status = "ok";
    for (const auto* rep : {&res.pca, &res.ica})
      for (std::size_t j = 0; j < n; ++j) {
        if (!rep->has_value()) {
          csv << ",NA";
          continue;
        }
        csv << ',' << (std::isfinite((**rep).rmse[j]) ? format_g17((**rep).rmse[j]) : "NA");
        if ((**rep).degenerate) status = "degenerate-" + (**rep).method;
      }
    csv << ',' << status << '\n';
  }
  write_file(dir / "sweep.csv", csv.str(), force);
}

}  // namespace bss
