#pragma once

#include "mrlr/casorati.hpp"
#include "mrlr/error.hpp"
#include "mrlr/measurement.hpp"
#include "mrlr/solver.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mrlr::cli {

/// Thrown for malformed or inconsistent experiment configurations.
class ConfigError : public Error {
public:
  using Error::Error;
};

struct DataConfig {
  std::string phantom = "standard";
  std::string geometry = "parallel";
  tomo::SimulationParams sim{};
  Index batches = 32;
  Index batch_width = 19;
  Index batch_overlap = 11;
  bool redistribute = false;
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  std::optional<std::pair<double, double>> window;
};

/// INI-style experiment description:
///
///   [data]    phantom, geometry, resolution, projections, step_deg, start_deg,
///             time_steps, oversample, noise, noise_model, seed,
///             batches, batch_width, batch_overlap, redistribute
///   [method]  name = glr | llr | mrlr | ls
///   [glr]     lambda
///   [llr]     lambda, patch_size
///   [mrlr]    lambda, wavelet, levels, patch_sizes (scale 0..J, coarse to fine)
///   [ls]      lambda_l, lambda_s, wavelet, levels, split
///   [solver]  gamma, allow_unsafe_gamma, max_iterations, tolerance, seed,
///             divergence_factor
///   [output]  directory, window = auto | lo,hi
///
/// Patch sizes are written "A" (square) or "AxB", lists comma-separated.
struct ExperimentConfig {
  std::string name;
  DataConfig data;
  solve::Method method = solve::Method::MRLR;
  std::map<solve::Method, solve::SolverConfig> methods;
  OutputConfig output;

  /// Solver settings of `m` (defaults to the configured method).
  const solve::SolverConfig &solver(std::optional<solve::Method> m = std::nullopt) const;
  /// Checks value ranges and that the layout of `m` fits the resolution.
  void validate(std::optional<solve::Method> m = std::nullopt) const;
};

ExperimentConfig parse_config(std::string_view text, const std::string &source = "<string>");
ExperimentConfig load_config(const std::filesystem::path &path);

std::vector<PatchSize> parse_patch_sizes(std::string_view text);
std::string format_patch_sizes(std::span<const PatchSize> sizes);
std::pair<double, double> parse_window(std::string_view text);

/// Names of the embedded presets, sorted.
std::vector<std::string> preset_names();
/// INI text of an embedded preset; throws ConfigError for unknown names.
const std::string &preset_text(const std::string &name);
ExperimentConfig load_preset(const std::string &name);

} // namespace mrlr::cli
