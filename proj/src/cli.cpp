#include "bss/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "bss/errors.hpp"
#include "bss/ica.hpp"
#include "bss/oracles.hpp"
#include "bss/pca.hpp"
#include "bss/preprocess.hpp"

namespace bss::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <std::size_t N>
std::string join(const std::array<std::string_view, N>& keys) {
  std::string out;
  for (auto k : keys) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(v))
    throw ParameterError(std::string(key) + ": not a finite number: '" + std::string(text) + "'");
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw ParameterError(std::string(key) + ": not a non-negative integer: '" +
                         std::string(text) + "'");
  return v;
}

std::size_t parse_t(std::string_view text) {
  const auto t = parse_unsigned("t", text);
  if (t < 2) throw ParameterError("t: must be >= 2");
  return static_cast<std::size_t>(t);
}

SourceSpec parse_source_kind(std::string_view text) {
  if (text == "sine") return SourceSpec::sine();
  if (text == "gaussian") return SourceSpec::gaussian(1.0);
  if (text == "line") return SourceSpec::line();
  throw ParameterError("sources: unknown kind '" + std::string(text) +
                       "' (valid: sine, gaussian, line)");
}

template <class F>
void for_each_of_kind(ScenarioConfig& cfg, SourceKind kind, std::string_view key, F&& f) {
  bool any = false;
  for (auto& s : cfg.sources)
    if (s.kind == kind) {
      f(s);
      any = true;
    }
  if (!any)
    throw ParameterError(std::string(key) + ": no " + std::string(to_string(kind)) +
                         " source in this configuration");
}

std::string fmt(const char* spec, double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<std::filesystem::path> planned_outputs(const ScenarioConfig& cfg,
                                                   const std::filesystem::path& dir) {
  const std::string name(to_string(cfg.name));
  std::vector<std::filesystem::path> files;
  if (cfg.run_pca) files.push_back(dir / ("report_" + name + "_pca.json"));
  if (cfg.run_ica) files.push_back(dir / ("report_" + name + "_ica.json"));
  files.push_back(dir / ("signals_" + name + ".csv"));
  return files;
}

void refuse_existing(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files)
    if (std::filesystem::exists(f))
      throw OutputExistsError(f.string() + " exists (pass --force to overwrite)");
}

struct CommonOptions {
  std::string scenario;
  std::size_t t = 0;
  double sigma = 0.0;
  std::uint64_t seed = kDefaultSeed;
  std::string out = std::string(kDefaultOutDir);
  bool force = false;
  std::vector<std::string> overrides;

  CLI::Option* t_opt = nullptr;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool single_sigma) {
  o.t_opt = cmd->add_option("--t", o.t, "Samples per channel (default 10000)");
  if (single_sigma)
    o.sigma_opt = cmd->add_option("--sigma", o.sigma, "Std dev of the gaussian source(s)");
  o.seed_opt = cmd->add_option("--seed", o.seed, "Base random seed")->capture_default_str();
  o.out_opt = cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_flag("--force", o.force, "Overwrite existing output files");
  cmd->add_option("--set", o.overrides, "Override key=value (t, sigma, seed, out_dir)")
      ->type_name("KEY=VALUE");
}

// Resolves one --scenario value into configs, applying flags then --set.
std::vector<ScenarioConfig> resolve(const CommonOptions& o, std::filesystem::path& out_dir,
                                    bool allow_all) {
  std::vector<ScenarioConfig> configs;
  out_dir = o.out;
  const bool seed_flag = o.seed_opt->count() > 0;
  if (allow_all && o.scenario == "all") {
    for (auto n : {ScenarioName::IcaWins, ScenarioName::Similar, ScenarioName::PcaWins})
      configs.push_back(ScenarioConfig::preset(n, o.seed));
  } else if (auto name = parse_scenario_name(o.scenario)) {
    configs.push_back(ScenarioConfig::preset(*name, o.seed));
  } else if (std::filesystem::is_regular_file(o.scenario)) {
    FileConfig fc = load_config(o.scenario);
    if (seed_flag) fc.scenario.seed = o.seed;
    if (fc.out_dir && o.out_opt->count() == 0) out_dir = *fc.out_dir;
    configs.push_back(std::move(fc.scenario));
  } else {
    throw ParameterError("--scenario: '" + o.scenario +
                         "' is not ica-wins, similar, pca-wins, custom" +
                         (allow_all ? ", all" : "") + " or an existing config file");
  }

  for (auto& cfg : configs) {
    if (o.t_opt->count()) cfg.t_count = o.t;
    if (o.sigma_opt && o.sigma_opt->count()) {
      if (std::isnan(cfg.sigma())) throw ParameterError("--sigma: scenario has no gaussian source");
      cfg.set_sigma(o.sigma);
    }
    for (const auto& kv : o.overrides) apply_override(kv, cfg, out_dir);
    cfg.validate();
  }
  return configs;
}

void print_result(const ScenarioResult& r, std::ostream& out) {
  out << to_string(r.config.name) << " (seed " << r.config.seed << ", T " << r.config.t_count
      << ", mixed corr " << fmt("%.4f", r.mixed_correlation) << ")\n";
  for (const auto* rep : {&r.pca, &r.ica}) {
    if (!rep->has_value()) continue;
    out << "  " << (**rep).method << " rmse:";
    for (double v : (**rep).rmse) out << ' ' << fmt("%.3f", v);
    if ((**rep).degenerate) out << "  [degenerate: " << (**rep).message << ']';
    out << '\n';
  }
}

int do_run(const CommonOptions& o, std::ostream& out) {
  std::filesystem::path dir;
  const auto configs = resolve(o, dir, true);
  if (!o.force) {
    std::vector<std::filesystem::path> files{dir / "tables.csv"};
    for (const auto& c : configs) {
      auto more = planned_outputs(c, dir);
      files.insert(files.end(), more.begin(), more.end());
    }
    refuse_existing(files);
  }

  std::vector<ScenarioResult> results;
  for (const auto& cfg : configs) {
    results.push_back(run_scenario(cfg));
    print_result(results.back(), out);
    write_scenario_outputs(results.back(), dir, o.force);
  }
  write_tables(results, dir, o.force);
  out << "outputs written to " << dir.string() << '\n';
  return kExitOk;
}

int do_sweep(const CommonOptions& o, const std::string& sigma_list, std::uint64_t seed_count,
             unsigned jobs, std::ostream& out) {
  std::filesystem::path dir;
  const auto configs = resolve(o, dir, false);
  const ScenarioConfig& base = configs.front();
  if (std::isnan(base.sigma())) throw ParameterError("sweep: scenario has no gaussian source");
  if (seed_count == 0) throw ParameterError("--seeds: must be >= 1");
  if (jobs == 0) throw ParameterError("--jobs: must be >= 1");

  const std::vector<double> sigmas = parse_number_list(sigma_list);
  for (double s : sigmas)
    if (s < 0.0) throw ParameterError("--sigma: values must be >= 0");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t k = 0; k < seed_count; ++k) seeds.push_back(base.seed + k);

  if (!o.force) refuse_existing({dir / "sweep.csv"});
  const auto rows = sweep(base, sigmas, seeds, jobs);
  write_sweep(rows, dir, o.force);

  // mean RMSE per sigma over seeds, both sources pooled
  std::map<double, std::array<double, 4>> agg;  // pca sum, pca n, ica sum, ica n
  for (const auto& row : rows) {
    auto& a = agg[row.sigma];
    if (!row.result) continue;
    for (int m = 0; m < 2; ++m) {
      const auto& rep = m == 0 ? row.result->pca : row.result->ica;
      if (!rep) continue;
      for (double v : rep->rmse)
        if (std::isfinite(v)) {
          a[2 * m] += v;
          a[2 * m + 1] += 1.0;
        }
    }
  }
  out << "sigma  mean_pca_rmse  mean_ica_rmse\n";
  for (const auto& [sg, a] : agg)
    out << fmt("%-6g", sg) << ' ' << fmt("%13.4f", a[1] > 0 ? a[0] / a[1] : NAN) << ' '
        << fmt("%13.4f", a[3] > 0 ? a[2] / a[3] : NAN) << '\n';
  out << rows.size() << " rows written to " << (dir / "sweep.csv").string() << '\n';
  return kExitOk;
}

int do_selftest(std::size_t pca_cases, std::size_t ica_cases, std::uint64_t seed,
                std::ostream& out) {
  std::size_t pca_ok = 0;
  double worst_rel = 0.0, worst_res = 0.0;
  for (std::size_t k = 0; k < pca_cases; ++k) {
    const std::size_t n = 2 + k % 4;
    const Matrix sigma = oracle::random_spd(n, stream_seed(seed, k));
    const ComponentBasis b = pca_fit_covariance(sigma, n, IterationOptions::pca_defaults(), seed + k);
    const Vector ref = oracle::eigenvalues(sigma);
    bool ok = b.all_converged();
    for (std::size_t i = 0; i < n; ++i) {
      const double rel = std::abs(b.eigenvalues[i] - ref[i]) / ref[i];
      const Vector w = b.w.column(i);
      Vector r = sigma * w;
      for (std::size_t j = 0; j < n; ++j) r[j] -= b.eigenvalues[i] * w[j];
      const double res = norm(r);
      worst_rel = std::max(worst_rel, rel);
      worst_res = std::max(worst_res, res);
      ok = ok && rel < 1e-6 && res < 1e-8;
    }
    pca_ok += ok;
  }
  out << "pca eigen oracle:     " << pca_ok << '/' << pca_cases << " passed (max rel err "
      << fmt("%.2e", worst_rel) << ", max residual " << fmt("%.2e", worst_res) << ")\n";

  std::size_t ica_ok = 0;
  double worst_angle = 0.0, worst_orth = 0.0;
  for (std::size_t k = 0; k < ica_cases; ++k) {
    const oracle::IcaCase c = oracle::ica_case(stream_seed(seed, 100000 + k));
    const Whitened w = whiten(c.mixed);
    const ComponentBasis b =
        ica_fit(w.x, ContrastFunction::log_cosh(), IterationOptions::ica_defaults(), seed + k);
    const auto best = oracle::rotation_grid(w.x, 2000);
    const double gap = oracle::angle_distance(oracle::demixing_angle(b.w), best.angle);
    const double orth = orthonormality_error(b.w);
    worst_angle = std::max(worst_angle, gap);
    worst_orth = std::max(worst_orth, orth);
    ica_ok += gap < 1e-2 && orth < 1e-8;
  }
  out << "ica rotation oracle:  " << ica_ok << '/' << ica_cases << " passed (max angle gap "
      << fmt("%.2e", worst_angle) << " rad, max |W^T W - I| " << fmt("%.2e", worst_orth)
      << ")\n";

  return pca_ok == pca_cases && ica_ok == ica_cases ? kExitOk : kExitRuntime;
}

}  // namespace

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> values;
  for (auto part : split(text, ',')) values.push_back(parse_double("list", part));
  return values;
}

FileConfig parse_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParameterError("config line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end())
      throw ParameterError("config line " + std::to_string(line_no) + ": unknown key '" +
                           std::string(key) + "' (valid keys: " + join(kConfigKeys) + ")");
    if (!kv.emplace(std::string(key), std::string(value)).second)
      throw ParameterError("config line " + std::to_string(line_no) + ": duplicate key '" +
                           std::string(key) + "'");
  }
  auto get = [&kv](std::string_view key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  FileConfig fc;
  ScenarioConfig& cfg = fc.scenario;
  cfg = ScenarioConfig::preset(ScenarioName::Custom);
  if (auto v = get("scenario")) {
    auto name = parse_scenario_name(*v);
    if (!name) throw ParameterError("scenario: unknown name '" + *v + "'");
    cfg = ScenarioConfig::preset(*name);
  }
  if (auto v = get("sources")) {
    cfg.sources.clear();
    for (auto part : split(*v, ',')) cfg.sources.push_back(parse_source_kind(part));
    if (cfg.sources.size() != 2 && !get("mixing"))
      throw ParameterError("sources: " + std::to_string(cfg.sources.size()) +
                           " sources need an explicit mixing matrix");
  }
  if (auto v = get("t")) cfg.t_count = parse_t(*v);
  if (auto v = get("seed")) cfg.seed = parse_unsigned("seed", *v);
  if (auto v = get("sigma")) {
    const double s = parse_double("sigma", *v);
    for_each_of_kind(cfg, SourceKind::GaussianNoise, "sigma", [s](SourceSpec& x) { x.sigma = s; });
  }
  if (auto v = get("amplitude")) {
    const double a = parse_double("amplitude", *v);
    for_each_of_kind(cfg, SourceKind::Sine, "amplitude", [a](SourceSpec& x) { x.amplitude = a; });
  }
  if (auto v = get("frequency_divisor")) {
    const double d = parse_double("frequency_divisor", *v);
    for_each_of_kind(cfg, SourceKind::Sine, "frequency_divisor",
                     [d](SourceSpec& x) { x.frequency_divisor = d; });
  }
  if (auto v = get("intercept")) {
    const double c = parse_double("intercept", *v);
    for_each_of_kind(cfg, SourceKind::Line, "intercept", [c](SourceSpec& x) { x.intercept = c; });
  }
  if (auto v = get("slope")) {
    const double c = parse_double("slope", *v);
    for_each_of_kind(cfg, SourceKind::Line, "slope", [c](SourceSpec& x) { x.slope = c; });
  }
  if (auto v = get("mixing")) {
    // row-major entries; ';' may separate rows
    std::string flat = *v;
    std::replace(flat.begin(), flat.end(), ';', ',');
    const auto entries = parse_number_list(flat);
    const std::size_t n = cfg.sources.size();
    if (entries.size() != n * n)
      throw ParameterError("mixing: expected " + std::to_string(n * n) + " entries for " +
                           std::to_string(n) + " sources, got " + std::to_string(entries.size()));
    Matrix a(n, n);
    for (std::size_t i = 0; i < entries.size(); ++i) a(i / n, i % n) = entries[i];
    cfg.mixing = a;
  }
  if (auto v = get("methods")) {
    cfg.run_pca = cfg.run_ica = false;
    for (auto part : split(*v, ',')) {
      if (part == "pca")
        cfg.run_pca = true;
      else if (part == "ica")
        cfg.run_ica = true;
      else
        throw ParameterError("methods: unknown method '" + std::string(part) + "' (valid: pca, ica)");
    }
  }
  if (auto v = get("out_dir")) fc.out_dir = std::filesystem::path(*v);
  cfg.validate();
  return fc;
}

FileConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void apply_override(std::string_view assignment, ScenarioConfig& config,
                    std::filesystem::path& out_dir) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ParameterError("--set: expected key=value, got '" + std::string(assignment) + "'");
  const auto key = trim(assignment.substr(0, eq));
  const auto value = trim(assignment.substr(eq + 1));
  if (key == "t") {
    config.t_count = parse_t(value);
  } else if (key == "sigma") {
    if (std::isnan(config.sigma())) throw ParameterError("sigma: scenario has no gaussian source");
    config.set_sigma(parse_double("sigma", value));
  } else if (key == "seed") {
    config.seed = parse_unsigned("seed", value);
  } else if (key == "out_dir") {
    if (value.empty()) throw ParameterError("out_dir: empty path");
    out_dir = std::filesystem::path(std::string(value));
  } else {
    throw ParameterError("--set: unknown key '" + std::string(key) +
                         "' (valid keys: " + join(kOverrideKeys) + ")");
  }
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Blind source separation experiments: PCA versus FastICA on synthetic mixtures",
               "bss"};
  app.require_subcommand(1, 1);

  CommonOptions run_opts;
  run_opts.scenario = "all";
  auto* run = app.add_subcommand("run", "Run canned scenarios or a config file, write reports");
  run->add_option("--scenario", run_opts.scenario,
                  "ica-wins | similar | pca-wins | custom | all | <config file>")
      ->capture_default_str();
  add_common(run, run_opts, true);

  CommonOptions sweep_opts;
  sweep_opts.scenario = "ica-wins";
  std::string sigma_list = "1,2,4,8";
  std::uint64_t seed_count = 10;
  unsigned jobs = 1;
  auto* sw = app.add_subcommand("sweep", "Run a scenario over a grid of noise levels and seeds");
  sw->add_option("--scenario", sweep_opts.scenario, "Base scenario name or config file")
      ->capture_default_str();
  sw->add_option("--sigma", sigma_list, "Comma-separated noise levels")->capture_default_str();
  sw->add_option("--seeds", seed_count, "Number of seeds, counting up from --seed")
      ->capture_default_str();
  sw->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  add_common(sw, sweep_opts, false);

  std::size_t pca_cases = 50, ica_cases = 20;
  std::uint64_t selftest_seed = kDefaultSeed;
  auto* st = app.add_subcommand("selftest", "Check PCA and FastICA against brute-force oracles");
  st->add_option("--pca-cases", pca_cases, "Random SPD matrices")->capture_default_str();
  st->add_option("--ica-cases", ica_cases, "Random 2-D mixtures")->capture_default_str();
  st->add_option("--seed", selftest_seed, "Seed for the random cases")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (run->parsed()) return do_run(run_opts, out);
    if (sw->parsed()) return do_sweep(sweep_opts, sigma_list, seed_count, jobs, out);
    return do_selftest(pca_cases, ica_cases, selftest_seed, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const OutputExistsError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace bss::cli
