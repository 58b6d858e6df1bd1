#include "mrlr_cli/config.hpp"

#include <map>

namespace mrlr::cli {

namespace {

const char *const kSolverAndOutput = R"([solver]
max_iterations = 2000
tolerance = 5e-4

)";

std::string simulated(const std::string &method, const std::string &mrlr_sizes) {
  return R"(; Simulated dynamic phantom, parallel beam, 256 x 256.
[data]
phantom = standard
geometry = parallel
resolution = 256
projections = 360
step_deg = 1
start_deg = 0
time_steps = 180
oversample = 2
noise = 0.03
noise_model = std
seed = 0
batches = 32
batch_width = 19
batch_overlap = 11
redistribute = false

[method]
name = )" + method + R"(

[glr]
lambda = 1.0

[llr]
lambda = 0.1
patch_size = 8x8

[mrlr]
lambda = 1.0
wavelet = db3
levels = 2
patch_sizes = )" + mrlr_sizes + R"(

[ls]
lambda_l = 0.2
lambda_s = 0.08
wavelet = db3
levels = 3
split = proportional

)" + kSolverAndOutput + R"([output]
directory = out/simulated-)" + method + R"(
window = auto
)";
}

std::string stempo(const std::string &method) {
  return R"(; Measured fan-beam data at 280 x 280; the geometry is not available,
; so these settings can be inspected and validated but not simulated.
[data]
phantom = standard
geometry = fan
resolution = 280
projections = 360
step_deg = 1
start_deg = 0
time_steps = 360
oversample = 1
noise = 0
seed = 0
batches = 32
batch_width = 19
batch_overlap = 11
redistribute = false

[method]
name = )" + method + R"(

[glr]
lambda = 1.0

[llr]
lambda = 0.1
patch_size = 7x7

[mrlr]
lambda = 1.0
wavelet = db3
levels = 3
patch_sizes = 35x35, 35x35, 35x35, 35x35

[ls]
lambda_l = 0.35
lambda_s = 0.02
wavelet = db3
levels = 3
split = proportional

)" + kSolverAndOutput + R"([output]
directory = out/stempo-)" + method + R"(
window = auto
)";
}

std::string desk(const std::string &method) {
  return R"(; Reduced experiment: 128 x 128, 180 projections in 2 degree steps over
; 90 time steps, 16 batches of 19 projections overlapping by 11.
; Weights are the simulated-preset values times 1000.
[data]
phantom = standard
geometry = parallel
resolution = 128
projections = 180
step_deg = 2
start_deg = 0
time_steps = 90
oversample = 2
noise = 0.03
noise_model = std
seed = 0
batches = 16
batch_width = 19
batch_overlap = 11
redistribute = false

[method]
name = )" + method + R"(

[glr]
lambda = 1000

[llr]
lambda = 100
patch_size = 4x4

[mrlr]
lambda = 1000
wavelet = db3
levels = 2
patch_sizes = 32x32, 32x32, 32x32

[ls]
lambda_l = 200
lambda_s = 80
wavelet = db3
levels = 3
split = proportional

)" + kSolverAndOutput + R"([output]
directory = out/desk-)" + method + R"(
window = auto
)";
}

const std::map<std::string, std::string> &registry() {
  static const std::map<std::string, std::string> presets = [] {
    std::map<std::string, std::string> p;
    for (const char *m : {"glr", "llr", "mrlr", "ls"})
      p["simulated-" + std::string(m)] = simulated(m, "64x64, 64x64, 64x64");
    p["simulated-mrlr-counts"] = simulated("mrlr", "32x32, 32x32, 32x32");
    for (const char *m : {"llr", "mrlr", "ls"}) {
      p["stempo-" + std::string(m)] = stempo(m);
      p["desk-" + std::string(m)] = desk(m);
    }
    p["desk-glr"] = desk("glr");
    return p;
  }();
  return presets;
}

} // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto &[name, text] : registry())
    out.push_back(name);
  return out;
}

const std::string &preset_text(const std::string &name) {
  const auto it = registry().find(name);
  if (it == registry().end())
    throw ConfigError("unknown preset '" + name + "'");
  return it->second;
}

ExperimentConfig load_preset(const std::string &name) {
  auto cfg = parse_config(preset_text(name), "preset " + name);
  cfg.name = name;
  return cfg;
}

} // namespace mrlr::cli
