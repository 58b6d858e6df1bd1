#include "mrlr_cli/commands.hpp"
#include "mrlr_cli/config.hpp"
#include "mrlr_cli/png_writer.hpp"

#include "mrlr/array_io.hpp"
#include "mrlr/measurement.hpp"
#include "mrlr/phantom.hpp"
#include "mrlr/projector.hpp"
#include "mrlr/regularizers.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <unistd.h>

using namespace mrlr;
using namespace mrlr::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("mrlr_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path &path() const { return path_; }

private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Small parallel-beam experiment that runs in well under a second.
ExperimentConfig tiny_config() {
  auto cfg = load_preset("desk-mrlr");
  cfg.data.sim.resolution = 32;
  cfg.data.sim.projections = 40;
  cfg.data.sim.step_deg = 4.5;
  cfg.data.sim.time_steps = 20;
  cfg.data.batches = 4;
  cfg.data.batch_width = 10;
  cfg.data.batch_overlap = 0;
  for (auto &[m, s] : cfg.methods) {
    s.levels = std::min(s.levels, 2);
    s.patch_sizes = {{8, 8}};
    s.max_iterations = 300;
  }
  return cfg;
}

int run_binary(const std::string &args) {
  const char *bin = std::getenv("MRLR_CLI_BINARY");
  if (!bin)
    return -1;
  const std::string cmd = std::string("\"") + bin + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Config, PatchSizes) {
  const auto one = parse_patch_sizes("8");
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].rows, 8);
  EXPECT_EQ(one[0].cols, 8);
  const auto many = parse_patch_sizes("35x35, 4x6,2");
  ASSERT_EQ(many.size(), 3u);
  EXPECT_EQ(many[1].rows, 4);
  EXPECT_EQ(many[1].cols, 6);
  EXPECT_EQ(format_patch_sizes(many), "35x35, 4x6, 2x2");
  EXPECT_THROW(parse_patch_sizes("8x"), ConfigError);
  EXPECT_THROW(parse_patch_sizes("0x4"), ConfigError);
  EXPECT_THROW(parse_patch_sizes(""), ConfigError);
}

TEST(Config, Window) {
  const auto w = parse_window("0.1, 2");
  EXPECT_DOUBLE_EQ(w.first, 0.1);
  EXPECT_DOUBLE_EQ(w.second, 2.0);
  EXPECT_THROW(parse_window("2,1"), ConfigError);
  EXPECT_THROW(parse_window("1"), ConfigError);
}

TEST(Config, ParsesSections) {
  const auto cfg = parse_config(R"(
[data]
resolution = 64
projections = 90
step_deg = 2
time_steps = 45
batches = 4
batch_width = 19
batch_overlap = 11
noise = 0.01
noise_model = variance
seed = 7

[method]
name = llr

[llr]
lambda = 0.25
patch_size = 4x8

[solver]
tolerance = 1e-3
max_iterations = 50
gamma = 0.1

[output]
directory = results
window = 0,1.5
)");
  EXPECT_EQ(cfg.data.sim.resolution, 64);
  EXPECT_EQ(cfg.data.sim.projections, 90);
  EXPECT_EQ(cfg.data.sim.noise_model, tomo::NoiseModel::RelativeVariance);
  EXPECT_EQ(cfg.data.sim.seed, 7u);
  EXPECT_EQ(cfg.method, solve::Method::LLR);
  const auto &s = cfg.solver();
  EXPECT_EQ(s.method, solve::Method::LLR);
  EXPECT_DOUBLE_EQ(s.lambda, 0.25);
  ASSERT_EQ(s.patch_sizes.size(), 1u);
  EXPECT_EQ(s.patch_sizes[0].rows, 4);
  EXPECT_EQ(s.patch_sizes[0].cols, 8);
  EXPECT_DOUBLE_EQ(s.tolerance, 1e-3);
  EXPECT_EQ(s.max_iterations, 50);
  ASSERT_TRUE(s.gamma.has_value());
  EXPECT_DOUBLE_EQ(*s.gamma, 0.1);
  EXPECT_EQ(cfg.output.directory, fs::path("results"));
  ASSERT_TRUE(cfg.output.window.has_value());
  EXPECT_DOUBLE_EQ(cfg.output.window->second, 1.5);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config("[data]\nresolutoin = 64\n"), ConfigError);
  EXPECT_THROW(parse_config("[bogus]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[data]\nresolution = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("[method]\nname = tv\n"), ConfigError);
}

TEST(Config, ValidateChecksLayout) {
  auto cfg = parse_config("[data]\nresolution = 100\n[method]\nname = mrlr\n[mrlr]\nlevels = 3\n");
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = parse_config("[data]\nresolution = 64\n[method]\nname = llr\n[llr]\npatch_size = 7\n");
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = parse_config("[data]\nprojections = 100\nbatches = 32\n");
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Presets, AllParseAndValidate) {
  const auto names = preset_names();
  for (const char *n : {"simulated-mrlr", "simulated-llr", "simulated-ls", "stempo-mrlr",
                        "stempo-llr", "stempo-ls", "desk-mrlr", "desk-llr", "desk-ls"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  for (const auto &n : names) {
    SCOPED_TRACE(n);
    const auto cfg = load_preset(n);
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(parse_config(preset_text(n), n).solver().lambda, cfg.solver().lambda);
  }
  EXPECT_THROW(load_preset("nope"), ConfigError);
}

TEST(Presets, TableValues) {
  const auto mrlr = load_preset("simulated-mrlr").solver();
  EXPECT_DOUBLE_EQ(mrlr.lambda, 1.0);
  EXPECT_EQ(mrlr.wavelet, "db3");
  EXPECT_EQ(mrlr.levels, 2);
  const auto ls = load_preset("simulated-ls").solver();
  EXPECT_DOUBLE_EQ(ls.lambda_l, 0.2);
  EXPECT_DOUBLE_EQ(ls.lambda_s, 0.08);
  EXPECT_EQ(ls.levels, 3);
  const auto sls = load_preset("stempo-ls").solver();
  EXPECT_DOUBLE_EQ(sls.lambda_l, 0.35);
  EXPECT_DOUBLE_EQ(sls.lambda_s, 0.02);
  const auto smrlr = load_preset("stempo-mrlr").solver();
  EXPECT_EQ(smrlr.levels, 3);
  ASSERT_EQ(smrlr.patch_sizes.size(), 4u);
  EXPECT_EQ(smrlr.patch_sizes[3].rows, 35);
  EXPECT_DOUBLE_EQ(load_preset("stempo-llr").solver().lambda, 0.1);
}

TEST(Presets, LlrGridOnFullResolution) {
  const auto cfg = load_preset("simulated-llr");
  const auto reg = solve::make_regularizer(cfg.solver(), 256, 256);
  const auto *llr = dynamic_cast<const LocalLowRank *>(reg.get());
  ASSERT_NE(llr, nullptr);
  const auto &g = llr->layout().entries().at(0);
  EXPECT_EQ(g.grid_rows, 32);
  EXPECT_EQ(g.grid_cols, 32);
  EXPECT_EQ(g.patch_rows, 8);
}

// Stated counts run from the finest scale to the coarsest.
TEST(Presets, MrlrCountsVariantMatchesStatedGrids) {
  const auto reg = solve::make_regularizer(load_preset("simulated-mrlr-counts").solver(), 256, 256);
  const auto *m = dynamic_cast<const MultiresolutionLowRank *>(reg.get());
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->layout().find(0, Direction::LL).count(), 2 * 2);
  EXPECT_EQ(m->layout().find(1, Direction::LH).count(), 2 * 2);
  EXPECT_EQ(m->layout().find(2, Direction::HH).count(), 4 * 4);
}

TEST(Simulate, RejectsFanBeam) {
  TempDir dir;
  EXPECT_THROW(cmd_simulate(load_preset("stempo-mrlr"), dir.path()), ConfigError);
}

TEST(Simulate, DefaultPresetShapes) {
  TempDir dir;
  cmd_simulate(load_preset("simulated-mrlr"), dir.path());
  const auto sino = read_array(dir.path() / SimulationFiles::sinogram);
  const Index d = tomo::ParallelGeometry::default_detectors(256, 256);
  EXPECT_EQ(sino.shape, (std::vector<std::int64_t>{360, d}));
  const auto ref = read_array(dir.path() / SimulationFiles::reference);
  EXPECT_EQ(ref.shape, (std::vector<std::int64_t>{32, 256, 256}));
  const auto manifest = read_json(dir.path() / SimulationFiles::manifest);
  EXPECT_EQ(manifest.at("frames").get<int>(), 32);
  const auto plan = tomo::batch_plan_from_json(read_json(dir.path() / SimulationFiles::batches));
  EXPECT_EQ(plan.frames(), 32);
  EXPECT_EQ(plan.width, 19);
}

TEST(Simulate, DeterministicBytes) {
  TempDir a, b;
  const auto cfg = tiny_config();
  cmd_simulate(cfg, a.path());
  cmd_simulate(cfg, b.path());
  for (const char *f : {"sinogram.bin", "sinogram_clean.bin", "reference.bin", "batches.json"})
    EXPECT_EQ(slurp(a.path() / f), slurp(b.path() / f)) << f;
  auto other = cfg;
  other.data.sim.seed = 99;
  TempDir c;
  cmd_simulate(other, c.path());
  EXPECT_NE(slurp(a.path() / "sinogram.bin"), slurp(c.path() / "sinogram.bin"));
  EXPECT_EQ(slurp(a.path() / "sinogram_clean.bin"), slurp(c.path() / "sinogram_clean.bin"));
}

TEST(Simulate, NoiselessEqualsProjector) {
  TempDir dir;
  auto cfg = tiny_config();
  cfg.data.sim.noise = 0.0;
  cfg.data.sim.oversample = 1;
  cmd_simulate(cfg, dir.path());
  const auto noisy = tomo::read_sinogram(dir.path() / SimulationFiles::sinogram);
  const auto clean = tomo::read_sinogram(dir.path() / SimulationFiles::clean_sinogram);
  EXPECT_EQ(noisy.values, clean.values);

  const auto phantom = tomo::DynamicPhantom::from_name(cfg.data.phantom);
  const Index n = cfg.data.sim.resolution;
  for (Index a : {Index{0}, Index{17}, Index{39}}) {
    const double tau = tomo::time_fraction(clean.time_index[a], cfg.data.sim.time_steps);
    const auto img = tomo::render_phantom(phantom, tau, n, n);
    tomo::ParallelGeometry g = tomo::ParallelGeometry::standard(n, n, {clean.angles_deg[a]});
    const tomo::ParallelProjector p(g);
    const Eigen::VectorXd expected = p.apply(img);
    EXPECT_LT((expected - clean.values.col(a)).norm(), 1e-10 * (1.0 + expected.norm())) << a;
  }
}

TEST(Reconstruct, WritesOutputs) {
  TempDir dir;
  const auto cfg = tiny_config();
  cmd_simulate(cfg, dir.path() / "data");
  for (auto m : {solve::Method::GLR, solve::Method::LLR, solve::Method::MRLR, solve::Method::LS}) {
    SCOPED_TRACE(std::string(solve::to_string(m)));
    const auto s = cmd_reconstruct(cfg, m, dir.path() / "data", dir.path() / "out");
    const auto x = read_sequence(s.reconstruction);
    EXPECT_EQ(x.frames(), 4);
    EXPECT_EQ(x.rows(), 32);
    EXPECT_TRUE(x.all_finite());
    const std::string tag(solve::to_string(m));
    EXPECT_TRUE(fs::exists(dir.path() / "out" / ("trace_" + tag + ".csv")));
    const auto run = read_json(dir.path() / "out" / ("run_" + tag + ".json"));
    EXPECT_TRUE(run.contains("wall_seconds"));
    EXPECT_EQ(run.at("iterations").get<Index>(), s.result.iterations);
    EXPECT_EQ(run.at("solver").at("method").get<std::string>(), tag);
  }
  const auto l = read_sequence(dir.path() / "out" / "recon_ls_L");
  const auto sp = read_sequence(dir.path() / "out" / "recon_ls_S");
  const auto x = read_sequence(dir.path() / "out" / "recon_ls");
  ImageSequence sum = l;
  sum.flat() += sp.flat();
  sum.clamp_nonnegative();
  EXPECT_LT((sum.flat() - x.flat()).norm(), 1e-9 * (1.0 + x.norm()));
}

TEST(Reconstruct, MissingInputsThrow) {
  TempDir dir;
  EXPECT_THROW(cmd_reconstruct(tiny_config(), solve::Method::MRLR, dir.path(), dir.path()),
               IoError);
}

TEST(Evaluate, IdentityZeroAndColumns) {
  TempDir dir;
  ImageSequence ref(3, 16, 16);
  for (Index t = 0; t < 3; ++t)
    for (Index j = 0; j < 16; ++j)
      for (Index i = 0; i < 16; ++i)
        ref(t, i, j) = 1.0 + std::sin(0.3 * i + 0.2 * j + t);
  write_sequence(dir.path() / "ref", ref);
  write_sequence(dir.path() / "zero", ImageSequence(3, 16, 16));

  const auto self = cmd_evaluate(dir.path() / "ref", dir.path() / "ref", dir.path() / "self.csv");
  ASSERT_EQ(self.frames.size(), 3u);
  for (const auto &f : self.frames) {
    EXPECT_NEAR(f.rel_l2, 0.0, 1e-15);
    EXPECT_NEAR(f.ssim, 1.0, 1e-12);
  }
  const auto zero = cmd_evaluate(dir.path() / "zero", dir.path() / "ref", std::nullopt);
  for (const auto &f : zero.frames)
    EXPECT_NEAR(f.rel_l2, 1.0, 1e-15);

  std::ifstream csv(dir.path() / "self.csv");
  std::string header, row;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,rel_l2,ssim,haarpsi");
  int rows = 0;
  while (std::getline(csv, row)) {
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 3) << row;
    ++rows;
  }
  EXPECT_EQ(rows, 3);

  write_sequence(dir.path() / "small", ImageSequence(3, 8, 8));
  EXPECT_THROW(cmd_evaluate(dir.path() / "small", dir.path() / "ref", std::nullopt), ShapeError);
}

TEST(ExportPng, WindowAndNaming) {
  TempDir dir;
  ImageSequence f(3, 5, 7);
  for (Index j = 0; j < 7; ++j)
    for (Index i = 0; i < 5; ++i) {
      f(0, i, j) = 2.0;
      f(1, i, j) = (i + j) % 2;
      f(2, i, j) = -1.0 + 0.5 * j;
    }
  write_sequence(dir.path() / "seq", f);
  cmd_export_png(dir.path() / "seq", dir.path() / "png", std::pair{0.0, 1.0});
  for (const char *n : {"frame_000.png", "frame_001.png", "frame_002.png"})
    EXPECT_TRUE(fs::exists(dir.path() / "png" / n)) << n;
  EXPECT_FALSE(fs::exists(dir.path() / "png" / "frame_003.png"));

  int rows = 0, cols = 0;
  const auto constant = read_png_gray8(dir.path() / "png" / "frame_000.png", rows, cols);
  EXPECT_EQ(rows, 5);
  EXPECT_EQ(cols, 7);
  for (auto v : constant)
    EXPECT_EQ(v, 255);
  const auto binary = read_png_gray8(dir.path() / "png" / "frame_001.png", rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      EXPECT_EQ(binary[i * cols + j], (i + j) % 2 ? 255 : 0);

  // Default window [0, max]: the constant 2.0 frame maps to white.
  cmd_export_png(dir.path() / "seq", dir.path() / "auto", std::nullopt);
  const auto ramp = read_png_gray8(dir.path() / "auto" / "frame_002.png", rows, cols);
  EXPECT_EQ(ramp[0], 0);
  EXPECT_EQ(ramp[cols - 1], 255);
  EXPECT_EQ(ramp[4], 128);
}

TEST(ExportPng, UnwritableDirectory) {
  TempDir dir;
  write_sequence(dir.path() / "seq", ImageSequence(1, 2, 2));
  std::ofstream(dir.path() / "file") << "x";
  EXPECT_THROW(cmd_export_png(dir.path() / "seq", dir.path() / "file" / "sub", std::nullopt),
               IoError);
}

TEST(Binary, ExitCodes) {
  if (!std::getenv("MRLR_CLI_BINARY"))
    GTEST_SKIP() << "MRLR_CLI_BINARY not set";
  TempDir dir;
  const auto ini = dir.path() / "tiny.ini";
  std::ofstream(ini) << R"([data]
resolution = 32
projections = 40
step_deg = 4.5
time_steps = 20
batches = 4
batch_width = 10
batch_overlap = 0
[method]
name = llr
[llr]
patch_size = 8x8
[solver]
max_iterations = 200
)";
  const auto d = dir.path().string();
  EXPECT_EQ(run_binary("--list-presets"), 0);
  EXPECT_EQ(run_binary("--print-preset simulated-mrlr"), 0);
  EXPECT_EQ(run_binary("simulate --config " + ini.string() + " --out " + d + "/data"), 0);
  EXPECT_EQ(run_binary("reconstruct --config " + ini.string() + " --data " + d + "/data"), 0);
  EXPECT_EQ(run_binary("evaluate " + d + "/data/recon_llr " + d + "/data/reference --csv " + d +
                       "/m.csv"),
            0);
  EXPECT_EQ(run_binary("export-png " + d + "/data/recon_llr --out " + d + "/png --window 0,1"), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "png" / "frame_003.png"));

  EXPECT_NE(run_binary("simulate --preset stempo-mrlr --out " + d + "/fan"), 0);
  EXPECT_NE(run_binary("simulate --config " + d + "/missing.ini"), 0);
  EXPECT_NE(run_binary("reconstruct --config " + ini.string() + " --data " + d + "/nothing"), 0);
  EXPECT_NE(run_binary("evaluate " + d + "/data/recon_llr " + d + "/data/sinogram"), 0);
  EXPECT_NE(run_binary("reconstruct --config " + ini.string() + " --method tv --data " + d +
                       "/data"),
            0);
}
