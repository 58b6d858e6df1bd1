#include "mrlr/measurement.hpp"

#include "mrlr/array_io.hpp"
#include "mrlr/error.hpp"

#include <cmath>
#include <random>

namespace mrlr::tomo {

void Sinogram::validate() const {
  if (static_cast<Index>(angles_deg.size()) != projections() ||
      static_cast<Index>(time_index.size()) != projections())
    throw ShapeError("Sinogram: angle and time lists must match the projection count");
  if (!values.allFinite())
    throw NumericError("Sinogram: non-finite values");
  for (std::size_t a = 1; a < time_index.size(); ++a)
    if (time_index[a] < time_index[a - 1])
      throw ParameterError("Sinogram: time indices must be non-decreasing");
  if (!time_index.empty() && (time_index.front() < 0 || time_index.back() >= time_steps))
    throw ParameterError("Sinogram: time index out of range");
}

void SimulationParams::validate() const {
  if (resolution < 1 || projections < 1 || time_steps < 1 || oversample < 1)
    throw ParameterError("simulation: sizes must be positive");
  if (time_steps > projections)
    throw ParameterError("simulation: more time steps than projections");
  if (!(step_deg > 0.0) || !std::isfinite(start_deg))
    throw ParameterError("simulation: angular step must be positive");
  if (!(noise >= 0.0))
    throw ParameterError("simulation: noise level must be non-negative");
}

double time_fraction(Index step, Index time_steps) {
  if (time_steps <= 1)
    return 0.0;
  return static_cast<double>(step) / static_cast<double>(time_steps - 1);
}

SimulationResult simulate_measurement(const DynamicPhantom &phantom,
                                      const SimulationParams &params) {
  params.validate();
  phantom.validate();
  const Index N = params.resolution;
  const Index os = params.oversample;
  const Index D = ParallelGeometry::default_detectors(N, N);

  Sinogram clean;
  clean.values.resize(D, params.projections);
  clean.time_steps = params.time_steps;
  clean.spacing = 1.0;
  for (Index a = 0; a < params.projections; ++a) {
    clean.angles_deg.push_back(params.start_deg + static_cast<double>(a) * params.step_deg);
    clean.time_index.push_back(a * params.time_steps / params.projections);
  }

  for (Index k = 0; k < params.time_steps; ++k) {
    std::vector<double> angles;
    std::vector<Index> columns;
    for (Index a = 0; a < params.projections; ++a)
      if (clean.time_index[static_cast<std::size_t>(a)] == k) {
        angles.push_back(clean.angles_deg[static_cast<std::size_t>(a)]);
        columns.push_back(a);
      }
    if (columns.empty())
      continue;
    const Eigen::MatrixXd fine =
        render_phantom(phantom, time_fraction(k, params.time_steps), N * os, N * os);
    ParallelGeometry g;
    g.angles_deg = angles;
    g.detectors = D * os;
    g.spacing = 1.0;
    g.rows = N * os;
    g.cols = N * os;
    const Eigen::VectorXd p = ParallelProjector(g).apply(fine);
    for (std::size_t q = 0; q < columns.size(); ++q) {
      const Index offset = static_cast<Index>(q) * D * os;
      for (Index m = 0; m < D; ++m) {
        double sum = 0.0;
        for (Index r = 0; r < os; ++r)
          sum += p(offset + m * os + r);
        // Mean over the fine bins, converted from fine- to target-pixel lengths.
        clean.values(m, columns[q]) = sum / static_cast<double>(os * os);
      }
    }
  }

  SimulationResult result;
  result.clean = clean;
  result.noisy = clean;
  const double peak = clean.values.cwiseAbs().maxCoeff();
  const double level =
      params.noise_model == NoiseModel::RelativeStd ? params.noise : std::sqrt(params.noise);
  result.noise_sigma = level * peak;
  if (result.noise_sigma > 0.0) {
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> normal(0.0, result.noise_sigma);
    for (Index a = 0; a < clean.projections(); ++a)
      for (Index m = 0; m < D; ++m)
        result.noisy.values(m, a) += normal(rng);
  }
  return result;
}

BatchPlan batch_sinogram(const Sinogram &s, Index n_batches, Index width, Index overlap,
                         bool redistribute) {
  if (n_batches < 1 || width < 1)
    throw ParameterError("batch_sinogram: need at least one batch of positive width");
  if (overlap < 0 || width <= overlap)
    throw ParameterError("batch_sinogram: width must exceed overlap");
  const Index P = s.projections();
  if (static_cast<Index>(s.time_index.size()) != P)
    throw ShapeError("batch_sinogram: sinogram time indices missing");

  BatchPlan plan;
  plan.width = width;
  plan.overlap = overlap;
  plan.redistributed = redistribute;
  for (Index i = 0; i < n_batches; ++i) {
    Index start = i * (width - overlap);
    if (redistribute) {
      if (width > P)
        throw ParameterError("batch_sinogram: batch wider than the sinogram");
      start = n_batches == 1 ? 0
                             : static_cast<Index>(std::llround(static_cast<double>(i * (P - width)) /
                                                               static_cast<double>(n_batches - 1)));
    }
    if (start + width > P)
      throw ParameterError("batch_sinogram: plan needs " + std::to_string(start + width) +
                           " projections but the sinogram has " + std::to_string(P));
    Batch b;
    b.start = start;
    b.width = width;
    b.reference_time = s.time_index[static_cast<std::size_t>(start + width / 2)];
    plan.batches.push_back(b);
  }
  return plan;
}

nlohmann::json to_json(const BatchPlan &plan) {
  nlohmann::json doc;
  doc["width"] = plan.width;
  doc["overlap"] = plan.overlap;
  doc["redistributed"] = plan.redistributed;
  doc["batches"] = nlohmann::json::array();
  for (const auto &b : plan.batches)
    doc["batches"].push_back({{"start", b.start}, {"end", b.end()}, {"reference_time", b.reference_time}});
  return doc;
}

BatchPlan batch_plan_from_json(const nlohmann::json &doc) {
  try {
    BatchPlan plan;
    plan.width = doc.at("width").get<Index>();
    plan.overlap = doc.at("overlap").get<Index>();
    plan.redistributed = doc.value("redistributed", false);
    for (const auto &e : doc.at("batches")) {
      Batch b;
      b.start = e.at("start").get<Index>();
      b.width = e.at("end").get<Index>() - b.start;
      b.reference_time = e.at("reference_time").get<Index>();
      if (b.width != plan.width || b.width < 1)
        throw IoError("batch plan: inconsistent batch width");
      plan.batches.push_back(b);
    }
    if (plan.batches.empty())
      throw IoError("batch plan: no batches");
    return plan;
  } catch (const nlohmann::json::exception &e) {
    throw IoError(std::string("batch plan: ") + e.what());
  }
}

BatchedProblem make_batched_problem(const Sinogram &s, const BatchPlan &plan, Index rows,
                                    Index cols) {
  s.validate();
  if (plan.batches.empty())
    throw ParameterError("make_batched_problem: empty plan");
  BatchedProblem problem;
  std::vector<std::shared_ptr<const FrameOperator>> blocks;
  const Index D = s.detectors();
  for (const auto &b : plan.batches) {
    if (b.start < 0 || b.end() > s.projections())
      throw ParameterError("make_batched_problem: batch outside the sinogram");
    ParallelGeometry g;
    g.angles_deg.assign(s.angles_deg.begin() + b.start, s.angles_deg.begin() + b.end());
    g.detectors = D;
    g.spacing = s.spacing;
    g.rows = rows;
    g.cols = cols;
    blocks.push_back(std::make_shared<ParallelProjector>(std::move(g)));
    problem.data.push_back(s.values.middleCols(b.start, b.width).reshaped());
  }
  problem.op = BlockDiagonalOperator(std::move(blocks));
  return problem;
}

ImageSequence reference_frames(const DynamicPhantom &phantom, const BatchPlan &plan,
                               Index time_steps, Index resolution, Index oversample) {
  ImageSequence f(plan.frames(), resolution, resolution);
  for (Index t = 0; t < plan.frames(); ++t)
    f.frame(t) = render_reference(
        phantom, time_fraction(plan.batches[static_cast<std::size_t>(t)].reference_time, time_steps),
        resolution, resolution, oversample);
  return f;
}

void write_sinogram(const std::filesystem::path &base, const Sinogram &s,
                    const nlohmann::json &meta) {
  s.validate();
  nlohmann::json m = meta;
  m["kind"] = "sinogram";
  m["angles_deg"] = s.angles_deg;
  m["time_index"] = s.time_index;
  m["time_steps"] = s.time_steps;
  m["spacing"] = s.spacing;
  const Eigen::MatrixXd stored = s.values.transpose();
  const std::int64_t shape[2] = {s.projections(), s.detectors()};
  write_array(base, std::span<const double>(stored.data(), static_cast<std::size_t>(stored.size())),
              shape, m);
}

Sinogram read_sinogram(const std::filesystem::path &base) {
  ArrayFile file = read_array(base);
  if (file.shape.size() != 2)
    throw IoError("sinogram file must be two-dimensional");
  try {
    Sinogram s;
    const Eigen::Map<const Eigen::MatrixXd> stored(file.data.data(), file.shape[0], file.shape[1]);
    s.values = stored.transpose();
    s.angles_deg = file.meta.at("angles_deg").get<std::vector<double>>();
    s.time_index = file.meta.at("time_index").get<std::vector<Index>>();
    s.time_steps = file.meta.at("time_steps").get<Index>();
    s.spacing = file.meta.value("spacing", 1.0);
    s.validate();
    return s;
  } catch (const nlohmann::json::exception &e) {
    throw IoError(std::string("sinogram metadata: ") + e.what());
  }
}

} // namespace mrlr::tomo
