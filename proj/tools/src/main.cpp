#include "mrlr_cli/commands.hpp"

#include "mrlr/parallel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace mrlr;
using namespace mrlr::cli;
namespace fs = std::filesystem;

struct Source {
  std::string config;
  std::string preset;

  ExperimentConfig load() const {
    if (!config.empty())
      return load_config(config);
    if (!preset.empty())
      return load_preset(preset);
    throw ConfigError("one of --config or --preset is required");
  }
};

void add_source(CLI::App *cmd, Source &src) {
  auto *c = cmd->add_option("--config", src.config, "INI configuration file");
  auto *p = cmd->add_option("--preset", src.preset, "embedded preset name");
  c->excludes(p);
}

void print_report(const metrics::MetricReport &r) {
  std::printf("frames %zu\nmean_rel_l2 %.6f\nmean_ssim %.6f\nmean_haarpsi %.6f\n",
              r.frames.size(), r.mean_rel_l2, r.mean_ssim, r.mean_haarpsi);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Dynamic tomography reconstruction with multiresolution low-rank regularization"};
  app.require_subcommand(0, 1);

  std::string print_preset;
  bool list_presets = false;
  app.add_option("--print-preset", print_preset, "print the INI text of a preset");
  app.add_flag("--list-presets", list_presets, "list embedded presets");

  Source sim_src;
  std::string sim_out;
  std::optional<std::uint64_t> sim_seed;
  std::optional<double> sim_noise;
  auto *sim = app.add_subcommand("simulate", "simulate a batched measurement");
  add_source(sim, sim_src);
  sim->add_option("--out", sim_out, "output directory (default: <output.directory>/data)");
  sim->add_option("--seed", sim_seed, "noise seed");
  sim->add_option("--noise", sim_noise, "noise level");

  Source rec_src;
  std::string rec_method, rec_data, rec_out;
  std::optional<std::uint64_t> rec_seed;
  auto *rec = app.add_subcommand("reconstruct", "reconstruct from simulated data");
  add_source(rec, rec_src);
  rec->add_option("--method", rec_method, "glr, llr, mrlr or ls (default: [method] name)");
  rec->add_option("--data", rec_data, "simulate output directory")->required();
  rec->add_option("--out", rec_out, "output directory (default: --data)");
  rec->add_option("--seed", rec_seed, "power-iteration seed");

  std::string ev_recon, ev_ref, ev_csv;
  auto *ev = app.add_subcommand("evaluate", "per-frame metrics against reference frames");
  ev->add_option("recon", ev_recon, "reconstruction base path")->required();
  ev->add_option("reference", ev_ref, "reference base path")->required();
  ev->add_option("--csv", ev_csv, "write per-frame metrics");

  std::string png_in, png_out, png_window;
  auto *png = app.add_subcommand("export-png", "write frames as 8-bit PNG files");
  png->add_option("sequence", png_in, "sequence base path")->required();
  png->add_option("--out", png_out, "output directory")->required();
  png->add_option("--window", png_window, "display window lo,hi");

  CLI11_PARSE(app, argc, argv);

  try {
    configure_threads();
    if (list_presets) {
      for (const auto &n : preset_names())
        std::cout << n << '\n';
      return 0;
    }
    if (!print_preset.empty()) {
      std::cout << preset_text(print_preset);
      return 0;
    }
    if (*sim) {
      auto cfg = sim_src.load();
      if (sim_seed)
        cfg.data.sim.seed = *sim_seed;
      if (sim_noise)
        cfg.data.sim.noise = *sim_noise;
      const fs::path out = sim_out.empty() ? cfg.output.directory / "data" : fs::path(sim_out);
      cmd_simulate(cfg, out);
      std::cout << "simulated " << cfg.name << " into " << out.string() << '\n';
    } else if (*rec) {
      auto cfg = rec_src.load();
      const auto method =
          rec_method.empty() ? cfg.method : solve::method_from_string(rec_method);
      if (rec_seed) {
        const auto it = cfg.methods.find(method);
        if (it != cfg.methods.end())
          it->second.seed = *rec_seed;
      }
      const fs::path out = rec_out.empty() ? fs::path(rec_data) : fs::path(rec_out);
      const auto s = cmd_reconstruct(cfg, method, rec_data, out);
      std::printf("%s: %lld iterations, %s, %.1f s -> %s\n",
                  std::string(solve::to_string(method)).c_str(),
                  static_cast<long long>(s.result.iterations),
                  s.result.converged ? "converged" : "not converged", s.seconds,
                  s.reconstruction.string().c_str());
    } else if (*ev) {
      std::optional<fs::path> csv;
      if (!ev_csv.empty())
        csv = ev_csv;
      print_report(cmd_evaluate(ev_recon, ev_ref, csv));
    } else if (*png) {
      std::optional<std::pair<double, double>> window;
      if (!png_window.empty() && png_window != "auto")
        window = parse_window(png_window);
      cmd_export_png(png_in, png_out, window);
    } else {
      std::cout << app.help();
      return 2;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
