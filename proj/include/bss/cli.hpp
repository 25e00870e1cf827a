#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bss/scenarios.hpp"

namespace bss::cli {

/// Keys accepted in a scenario config file (`key = value`, one per line,
/// `#` starts a comment).
inline constexpr std::array<std::string_view, 12> kConfigKeys = {
    "scenario", "sources",   "t",         "sigma", "seed",   "amplitude",
    "frequency_divisor",     "intercept", "slope", "mixing", "methods",
    "out_dir"};

/// Keys accepted by `--set key=value`.
inline constexpr std::array<std::string_view, 4> kOverrideKeys = {"t", "sigma", "seed",
                                                                  "out_dir"};

inline constexpr std::string_view kDefaultOutDir = "./out";

struct FileConfig {
  ScenarioConfig scenario;
  std::optional<std::filesystem::path> out_dir;
};

/// Parses config text. Throws ParameterError on unknown keys (listing the
/// valid ones), malformed lines or bad values.
FileConfig parse_config(std::string_view text);
FileConfig load_config(const std::filesystem::path& path);

/// Applies one `key=value` override. Throws ParameterError for keys outside
/// kOverrideKeys.
void apply_override(std::string_view assignment, ScenarioConfig& config,
                    std::filesystem::path& out_dir);

/// Comma-separated list of finite numbers.
std::vector<double> parse_number_list(std::string_view text);

/// Entry point. Exit codes: 0 ok, 1 invalid input, 2 runtime failure.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bss::cli
