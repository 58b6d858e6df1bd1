#include "mrlr_cli/commands.hpp"

#include "mrlr_cli/png_writer.hpp"

#include "mrlr/array_io.hpp"
#include "mrlr/parallel.hpp"

#include <chrono>
#include <cstdio>

namespace mrlr::cli {

namespace fs = std::filesystem;

namespace {

nlohmann::json data_json(const DataConfig &d) {
  return {{"phantom", d.phantom},
          {"geometry", d.geometry},
          {"resolution", d.sim.resolution},
          {"projections", d.sim.projections},
          {"step_deg", d.sim.step_deg},
          {"start_deg", d.sim.start_deg},
          {"time_steps", d.sim.time_steps},
          {"oversample", d.sim.oversample},
          {"noise", d.sim.noise},
          {"noise_model", d.sim.noise_model == tomo::NoiseModel::RelativeStd ? "std" : "variance"},
          {"seed", d.sim.seed},
          {"batches", d.batches},
          {"batch_width", d.batch_width},
          {"batch_overlap", d.batch_overlap},
          {"redistribute", d.redistribute}};
}

nlohmann::json solver_json(const solve::SolverConfig &c) {
  nlohmann::json j{{"method", solve::to_string(c.method)},
                   {"max_iterations", c.max_iterations},
                   {"tolerance", c.tolerance},
                   {"seed", c.seed}};
  if (c.gamma)
    j["gamma"] = *c.gamma;
  switch (c.method) {
  case solve::Method::GLR:
    j["lambda"] = c.lambda;
    break;
  case solve::Method::LLR:
    j["lambda"] = c.lambda;
    j["patch_sizes"] = format_patch_sizes(c.patch_sizes);
    break;
  case solve::Method::MRLR:
    j["lambda"] = c.lambda;
    j["wavelet"] = c.wavelet;
    j["levels"] = c.levels;
    j["patch_sizes"] = format_patch_sizes(c.patch_sizes);
    break;
  case solve::Method::LS:
    j["lambda_l"] = c.lambda_l;
    j["lambda_s"] = c.lambda_s;
    j["wavelet"] = c.wavelet;
    j["levels"] = c.levels;
    j["split"] = solve::to_string(c.split);
    break;
  }
  return j;
}

void require_file(const fs::path &base) {
  if (!fs::exists(bin_path(base)) || !fs::exists(sidecar_path(base)))
    throw IoError("missing input " + base.string() + " (.bin/.json)");
}

} // namespace

void cmd_simulate(const ExperimentConfig &config, const fs::path &out) {
  config.validate();
  if (config.data.geometry != "parallel")
    throw ConfigError(config.name + ": " + config.data.geometry +
                      "-beam geometry is not supported by the simulator");
  fs::create_directories(out);
  const auto phantom = tomo::DynamicPhantom::from_name(config.data.phantom);
  const auto sim = tomo::simulate_measurement(phantom, config.data.sim);
  const auto plan = tomo::batch_sinogram(sim.noisy, config.data.batches, config.data.batch_width,
                                         config.data.batch_overlap, config.data.redistribute);
  const auto refs = tomo::reference_frames(phantom, plan, config.data.sim.time_steps,
                                           config.data.sim.resolution, config.data.sim.oversample);

  const nlohmann::json meta{{"config", config.name}, {"noise_sigma", sim.noise_sigma}};
  tomo::write_sinogram(out / SimulationFiles::sinogram, sim.noisy, meta);
  tomo::write_sinogram(out / SimulationFiles::clean_sinogram, sim.clean, meta);
  write_json(out / SimulationFiles::batches, tomo::to_json(plan));
  nlohmann::json ref_meta{{"kind", "reference"}, {"reference_time", nlohmann::json::array()}};
  for (const auto &b : plan.batches)
    ref_meta["reference_time"].push_back(b.reference_time);
  write_sequence(out / SimulationFiles::reference, refs, ref_meta);

  nlohmann::json manifest{{"config", config.name},
                          {"data", data_json(config.data)},
                          {"noise_sigma", sim.noise_sigma},
                          {"detectors", sim.noisy.detectors()},
                          {"frames", plan.frames()},
                          {"files",
                           {{"sinogram", SimulationFiles::sinogram},
                            {"clean_sinogram", SimulationFiles::clean_sinogram},
                            {"reference", SimulationFiles::reference},
                            {"batches", SimulationFiles::batches}}}};
  write_json(out / SimulationFiles::manifest, manifest);
}

ReconstructionSummary cmd_reconstruct(const ExperimentConfig &config, solve::Method method,
                                      const fs::path &data, const fs::path &out) {
  config.validate(method);
  require_file(data / SimulationFiles::sinogram);
  if (!fs::exists(data / SimulationFiles::batches))
    throw IoError("missing input " + (data / SimulationFiles::batches).string());
  const auto sino = tomo::read_sinogram(data / SimulationFiles::sinogram);
  const auto plan = tomo::batch_plan_from_json(read_json(data / SimulationFiles::batches));
  const Index n = config.data.sim.resolution;
  const auto problem = tomo::make_batched_problem(sino, plan, n, n);
  const auto &cfg = config.solver(method);

  const auto start = std::chrono::steady_clock::now();
  ReconstructionSummary summary;
  summary.result = solve::solve(problem.op, problem.data, cfg);
  summary.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(out);
  const std::string tag(solve::to_string(method));
  const nlohmann::json meta{{"kind", "reconstruction"}, {"method", tag}, {"config", config.name}};
  summary.reconstruction = out / ("recon_" + tag);
  write_sequence(summary.reconstruction, summary.result.x, meta);
  if (method == solve::Method::LS) {
    write_sequence(out / "recon_ls_L", summary.result.low_rank, meta);
    write_sequence(out / "recon_ls_S", summary.result.sparse, meta);
  }
  solve::write_trace_csv(out / ("trace_" + tag + ".csv"), summary.result.trace);

  const auto &r = summary.result;
  nlohmann::json run{{"config", config.name},
                     {"data", data_json(config.data)},
                     {"solver", solver_json(cfg)},
                     {"iterations", r.iterations},
                     {"converged", r.converged},
                     {"gamma", r.gamma},
                     {"op_norm", r.op_norm},
                     {"initial_objective", r.initial_objective},
                     {"final_objective", r.trace.empty() ? r.initial_objective : r.trace.back().objective},
                     {"wall_seconds", summary.seconds},
                     {"threads", max_threads()}};
  write_json(out / ("run_" + tag + ".json"), run);
  return summary;
}

metrics::MetricReport cmd_evaluate(const fs::path &recon, const fs::path &reference,
                                   const std::optional<fs::path> &csv) {
  require_file(recon);
  require_file(reference);
  const auto x = read_sequence(recon);
  const auto ref = read_sequence(reference);
  auto report = metrics::evaluate(x, ref);
  if (csv) {
    if (csv->has_parent_path())
      fs::create_directories(csv->parent_path());
    metrics::write_metrics_csv(*csv, report);
  }
  return report;
}

void cmd_export_png(const fs::path &sequence, const fs::path &out,
                    std::optional<std::pair<double, double>> window) {
  require_file(sequence);
  const auto f = read_sequence(sequence);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out))
    throw IoError("cannot create output directory " + out.string());
  double lo = 0.0, hi = 0.0;
  if (window) {
    std::tie(lo, hi) = *window;
  } else {
    hi = f.empty() ? 0.0 : f.flat().maxCoeff();
    if (!(hi > lo))
      hi = lo + 1.0;
  }
  for (Index t = 0; t < f.frames(); ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03lld.png", static_cast<long long>(t));
    write_png_gray8(out / name, to_gray8(f.frame(t), lo, hi), static_cast<int>(f.rows()),
                    static_cast<int>(f.cols()));
  }
}

} // namespace mrlr::cli
