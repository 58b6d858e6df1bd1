#pragma once

#include "mrlr_cli/config.hpp"

#include "mrlr/metrics.hpp"

#include <filesystem>
#include <optional>
#include <utility>

namespace mrlr::cli {

/// Files written by `simulate` into the output directory.
struct SimulationFiles {
  static constexpr const char *sinogram = "sinogram";
  static constexpr const char *clean_sinogram = "sinogram_clean";
  static constexpr const char *reference = "reference";
  static constexpr const char *batches = "batches.json";
  static constexpr const char *manifest = "manifest.json";
};

/// Simulates the measurement and writes the sinogram, the batch plan, the
/// reference frames and a manifest into `out`.
void cmd_simulate(const ExperimentConfig &config, const std::filesystem::path &out);

struct ReconstructionSummary {
  std::filesystem::path reconstruction;
  solve::SolveResult result;
  double seconds = 0.0;
};

/// Reconstructs from the files of a simulate run in `data` and writes
/// recon_<method>, trace_<method>.csv and run_<method>.json into `out`
/// (plus recon_ls_L and recon_ls_S for L+S).
ReconstructionSummary cmd_reconstruct(const ExperimentConfig &config, solve::Method method,
                                      const std::filesystem::path &data,
                                      const std::filesystem::path &out);

/// Per-frame metrics of a reconstruction against reference frames; the CSV
/// is written when a path is given.
metrics::MetricReport cmd_evaluate(const std::filesystem::path &recon,
                                   const std::filesystem::path &reference,
                                   const std::optional<std::filesystem::path> &csv);

/// One 8-bit grayscale PNG per frame (frame_000.png, ...), values mapped
/// affinely from the window to [0, 255] and clamped. The default window is
/// [0, max over the sequence].
void cmd_export_png(const std::filesystem::path &sequence, const std::filesystem::path &out,
                    std::optional<std::pair<double, double>> window);

} // namespace mrlr::cli
