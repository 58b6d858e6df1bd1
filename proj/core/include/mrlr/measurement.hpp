#pragma once

#include "mrlr/operator.hpp"
#include "mrlr/phantom.hpp"
#include "mrlr/projector.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace mrlr::tomo {

/// Projections of a dynamic object. Column a of `values` is projection a
/// (detectors long), taken at angles_deg[a] while the object was in time
/// step time_index[a].
struct Sinogram {
  Eigen::MatrixXd values;
  std::vector<double> angles_deg;
  std::vector<Index> time_index;
  Index time_steps = 1;
  double spacing = 1.0;

  Index detectors() const { return values.rows(); }
  Index projections() const { return values.cols(); }
  void validate() const;
};

enum class NoiseModel { RelativeStd, RelativeVariance };

struct SimulationParams {
  Index resolution = 256;
  Index projections = 360;
  double step_deg = 1.0;
  double start_deg = 0.0;
  Index time_steps = 180;
  Index oversample = 2;
  double noise = 0.03;
  NoiseModel noise_model = NoiseModel::RelativeStd;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimulationResult {
  Sinogram clean;
  Sinogram noisy;
  double noise_sigma = 0.0;
};

/// Normalized time of step k out of n: k / (n - 1), or 0 when n = 1.
double time_fraction(Index step, Index time_steps);

/// Projections are spread evenly over time steps (projections / time_steps
/// each). Every projection is taken from a frame rendered at `oversample`
/// times the resolution; adjacent fine detector bins are averaged and the
/// result is expressed in target-pixel units. Gaussian noise of standard
/// deviation sigma is added, with sigma = noise * max|clean| (or
/// sqrt(noise) * max|clean| for RelativeVariance).
SimulationResult simulate_measurement(const DynamicPhantom &phantom, const SimulationParams &params);

struct Batch {
  Index start = 0;
  Index width = 0;
  Index reference_time = 0;
  Index end() const { return start + width; }
};

struct BatchPlan {
  std::vector<Batch> batches;
  Index width = 0;
  Index overlap = 0;
  bool redistributed = false;

  Index frames() const { return static_cast<Index>(batches.size()); }
  Index stride() const { return width - overlap; }
};

/// Batch i covers projections [i*(width - overlap), ... + width). With
/// `redistribute` the starts are spread evenly over the whole sinogram
/// instead. The reference time is the time step of the center projection.
BatchPlan batch_sinogram(const Sinogram &s, Index n_batches = 32, Index width = 19,
                         Index overlap = 11, bool redistribute = false);

nlohmann::json to_json(const BatchPlan &plan);
BatchPlan batch_plan_from_json(const nlohmann::json &doc);

/// One parallel-beam block per batch, acting on rows x cols frames, and
/// the matching measurement vectors.
struct BatchedProblem {
  BlockDiagonalOperator op;
  MeasurementSet data;
};

BatchedProblem make_batched_problem(const Sinogram &s, const BatchPlan &plan, Index rows,
                                    Index cols);

/// Ground-truth frames at the reference time of every batch.
ImageSequence reference_frames(const DynamicPhantom &phantom, const BatchPlan &plan,
                               Index time_steps, Index resolution, Index oversample);

/// Stored as a [projections, detectors] array; angles, time indices and
/// spacing go in the sidecar metadata.
void write_sinogram(const std::filesystem::path &base, const Sinogram &s,
                    const nlohmann::json &meta = nlohmann::json::object());
Sinogram read_sinogram(const std::filesystem::path &base);

} // namespace mrlr::tomo
