#include "mrlr/error.hpp"
#include "mrlr/measurement.hpp"
#include "mrlr/phantom.hpp"
#include "mrlr/projector.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace mrlr;
using namespace mrlr::tomo;
using mrlr::testing::random_matrix;
using mrlr::testing::Rng;

namespace {

ParallelGeometry geometry(Index n, std::vector<double> angles) {
  return ParallelGeometry::standard(n, n, std::move(angles));
}

Eigen::MatrixXd dense_matrix(const FrameOperator &op) {
  Eigen::MatrixXd A(op.output_size(), op.frame_rows() * op.frame_cols());
  for (Index k = 0; k < A.cols(); ++k) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(op.frame_rows(), op.frame_cols());
    e(k) = 1.0;
    A.col(k) = op.apply(e);
  }
  return A;
}

DynamicPhantom disk(double radius) {
  DynamicPhantom p;
  PhantomComponent c;
  c.shape = ShapeKind::Disk;
  c.attenuation = 1.0;
  c.a = radius;
  p.components.push_back(c);
  return p;
}

} // namespace

TEST(Projector, DetectorCount) {
  EXPECT_EQ(ParallelGeometry::default_detectors(256, 256), 363);
  EXPECT_EQ(ParallelGeometry::default_detectors(128, 64), 182);
  ParallelGeometry g = geometry(8, {0.0});
  g.spacing = 0.0;
  EXPECT_THROW(ParallelProjector{g}, ParameterError);
}

TEST(Projector, AdjointIdentity) {
  Rng rng(60);
  for (Index n : {7, 16, 33}) {
    std::vector<double> angles;
    for (int a = 0; a < 23; ++a)
      angles.push_back(-30.0 + a * 17.3);
    const ParallelProjector A(geometry(n, angles));
    const Eigen::MatrixXd f = random_matrix(rng, n, n);
    const Eigen::VectorXd g = random_matrix(rng, A.output_size(), 1);
    const double lhs = A.apply(f).dot(g);
    const double rhs = (f.array() * A.adjoint(g).array()).sum();
    EXPECT_LE(std::abs(lhs - rhs), 1e-8 * std::abs(lhs));
  }
}

TEST(Projector, Linearity) {
  Rng rng(61);
  const ParallelProjector A(geometry(20, {0.0, 33.0, 45.0, 91.0, 170.0}));
  const Eigen::MatrixXd f = random_matrix(rng, 20, 20), g = random_matrix(rng, 20, 20);
  const Eigen::VectorXd lhs = A.apply(2.5 * f - 0.75 * g);
  const Eigen::VectorXd rhs = 2.5 * A.apply(f) - 0.75 * A.apply(g);
  EXPECT_LE((lhs - rhs).norm(), 1e-10 * rhs.norm());
  EXPECT_EQ(A.apply(Eigen::MatrixXd::Zero(20, 20)).norm(), 0.0);
  EXPECT_THROW(A.apply(Eigen::MatrixXd::Zero(19, 20)), ShapeError);
  EXPECT_THROW(A.adjoint(Eigen::VectorXd::Zero(3)), ShapeError);
}

TEST(Projector, DiskProjectionsMatchChords) {
  const Index n = 64;
  const double r_pix = 20.0;
  // The disk in normalized units: radius r_pix / (n/2), anti-aliased.
  const Eigen::MatrixXd f = render_reference(disk(r_pix / 32.0), 0.0, n, n, 8);
  const std::vector<double> angles{0.0, 17.0, 45.0, 90.0, 133.0};
  const ParallelProjector A(geometry(n, angles));
  const Eigen::VectorXd p = A.apply(f);
  const Index D = A.geometry().detectors;
  for (std::size_t a = 0; a < angles.size(); ++a)
    for (Index k = 0; k < D; ++k) {
      const double s = A.geometry().detector_offset(k);
      auto chord = [&](double off) {
        return std::abs(off) < r_pix ? 2.0 * std::sqrt(r_pix * r_pix - off * off) : 0.0;
      };
      // Within two detector bins of smoothing: the value lies between chord
      // lengths evaluated up to two bins away, up to the pixelized boundary.
      double lo = chord(s), hi = chord(s);
      for (double d = -2.0; d <= 2.0; d += 0.25) {
        lo = std::min(lo, chord(s + d));
        hi = std::max(hi, chord(s + d));
      }
      const double v = p(static_cast<Index>(a) * D + k);
      EXPECT_GE(v, lo - 0.5) << "angle " << angles[a] << " s " << s;
      EXPECT_LE(v, hi + 0.5) << "angle " << angles[a] << " s " << s;
    }
}

TEST(Projector, ZeroDegreeIntegratesColumns) {
  // At 0 degrees the ray direction is +y, so each detector reads a column sum.
  Rng rng(62);
  const Index n = 9;
  const Eigen::MatrixXd f = random_matrix(rng, n, n);
  ParallelGeometry g = geometry(n, {0.0});
  g.detectors = n;
  const Eigen::VectorXd p = ParallelProjector(g).apply(f);
  for (Index j = 0; j < n; ++j)
    EXPECT_NEAR(p(j), f.col(j).sum(), 1e-12);
}

TEST(Projector, ImpulseBackprojectsToLine) {
  const Index n = 11;
  ParallelGeometry g = geometry(n, {0.0});
  g.detectors = n;
  const ParallelProjector A(g);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(4) = 1.0;
  const Eigen::MatrixXd b = A.adjoint(e);
  EXPECT_NEAR(b.col(4).sum(), static_cast<double>(n), 1e-12);
  EXPECT_NEAR(b.sum(), static_cast<double>(n), 1e-12);
  EXPECT_EQ(A.adjoint(Eigen::VectorXd::Zero(n)).norm(), 0.0);
}

TEST(OpNorm, Stubs) {
  EXPECT_NEAR(estimate_op_norm(ScaledIdentity(6, 5)), 1.0, 1e-12);
  EXPECT_NEAR(estimate_op_norm(ScaledIdentity(6, 5, 3.0)), 3.0, 1e-12);
  EXPECT_EQ(estimate_op_norm(ScaledIdentity(3, 3, 0.0)), 0.0);
}

TEST(OpNorm, MatchesDenseMatrixOnToyGeometry) {
  std::vector<double> angles;
  for (int a = 0; a < 12; ++a)
    angles.push_back(a * 15.0);
  const ParallelProjector A(geometry(8, angles));
  const double dense = mrlr::testing::dense_spectral_norm(dense_matrix(A));
  const double est = estimate_op_norm(A);
  EXPECT_LE(std::abs(est - dense), 0.01 * dense);
  EXPECT_NEAR(estimate_op_norm(A.geometry(), 4), est, 1e-12);
}

TEST(OpNorm, BlockDiagonalTakesMax) {
  auto a = std::make_shared<ScaledIdentity>(3, 3, 2.0);
  auto b = std::make_shared<ScaledIdentity>(3, 3, 5.0);
  const BlockDiagonalOperator op({a, b, a});
  EXPECT_NEAR(estimate_op_norm(op), 5.0, 1e-12);
  const auto m = op.apply(ImageSequence(3, 3, 3, std::vector<double>(27, 1.0)));
  EXPECT_NEAR(m[1](0), 5.0, 1e-15);
  EXPECT_THROW(BlockDiagonalOperator({a, std::make_shared<ScaledIdentity>(2, 3)}), ShapeError);
}

TEST(Phantom, MotionEndpointsAndStaticParts) {
  const auto p = DynamicPhantom::standard();
  const auto &mover = p.components[2];
  EXPECT_TRUE(mover.contains(-0.45, -0.45, 0.0));
  EXPECT_FALSE(mover.contains(-0.45, -0.45, 1.0));
  EXPECT_TRUE(mover.contains(0.45, -0.45, 1.0));

  DynamicPhantom ring;
  ring.components.push_back(p.components[0]);
  const auto r0 = render_phantom(ring, 0.0, 64, 64);
  EXPECT_EQ(r0, render_phantom(ring, 0.37, 64, 64));
  EXPECT_EQ(r0, render_phantom(ring, 1.0, 64, 64));
  EXPECT_GT(r0.sum(), 0.0);
  EXPECT_THROW(render_phantom(p, 1.5, 8, 8), ParameterError);
}

TEST(Phantom, FramesAreBoundedAndChanging) {
  const auto p = DynamicPhantom::standard();
  const auto a = render_phantom(p, 0.0, 96, 96);
  const auto b = render_phantom(p, 1.0, 96, 96);
  EXPECT_GE(a.minCoeff(), 0.0);
  EXPECT_LE(a.maxCoeff(), p.max_value());
  EXPECT_GT((a - b).norm(), 1.0);
}

TEST(Phantom, RotatingSquareTurnsCounterclockwise) {
  const auto &sq = DynamicPhantom::standard().components[5];
  // A point just outside the right edge near the top corner enters once the
  // square turns counterclockwise.
  const double y = 0.09, x = 0.105;
  EXPECT_FALSE(sq.contains(x, y, 0.0));
  const double th = 15.0 * std::numbers::pi / 180.0;
  const double u = std::cos(th) * x + std::sin(th) * y, v = -std::sin(th) * x + std::cos(th) * y;
  EXPECT_EQ(sq.contains(x, y, 1.0), std::abs(u) <= 0.1 && std::abs(v) <= 0.1);
  EXPECT_FALSE(sq.contains(0.1, -0.099, 1.0));
}

TEST(Phantom, DownsampledFineRenderMatchesCoarse) {
  const auto p = DynamicPhantom::standard();
  for (double tau : {0.0, 0.5, 1.0}) {
    const auto coarse = render_phantom(p, tau, 128, 128);
    const auto avg = block_average(render_phantom(p, tau, 256, 256), 2);
    const double rms = std::sqrt((coarse - avg).squaredNorm() / static_cast<double>(coarse.size()));
    EXPECT_LT(rms, 0.02 * coarse.maxCoeff()) << tau;
  }
  EXPECT_THROW(block_average(Eigen::MatrixXd::Zero(5, 4), 2), ShapeError);
}

TEST(Phantom, SingleSampleIsPointSampling) {
  const auto p = DynamicPhantom::standard();
  const auto img = render_phantom(p, 0.25, 20, 20, 1);
  for (Index j = 0; j < 20; ++j)
    for (Index i = 0; i < 20; ++i) {
      const double x = (j - 9.5) / 10.0, y = (9.5 - i) / 10.0;
      double v = 0.0;
      for (const auto &c : p.components)
        if (c.contains(x, y, 0.25))
          v += c.attenuation;
      EXPECT_DOUBLE_EQ(img(i, j), v);
    }
}

TEST(Measurement, StaticPhantomMirrorSymmetry) {
  SimulationParams sp;
  sp.resolution = 32;
  sp.projections = 360;
  sp.time_steps = 1;
  sp.noise = 0.0;
  const auto res = simulate_measurement(disk(0.5), sp);
  const auto &v = res.clean.values;
  const Index D = v.rows();
  for (Index a = 0; a < 180; a += 7)
    for (Index k = 0; k < D; ++k)
      EXPECT_NEAR(v(k, a), v(D - 1 - k, a + 180), 1e-6);
  EXPECT_EQ(res.noise_sigma, 0.0);
  EXPECT_EQ(res.clean.values, res.noisy.values);
}

TEST(Measurement, NoiseLevelAndReproducibility) {
  SimulationParams sp;
  sp.resolution = 32;
  sp.projections = 90;
  sp.step_deg = 2.0;
  sp.time_steps = 45;
  sp.seed = 99;
  const auto p = DynamicPhantom::standard();
  const auto a = simulate_measurement(p, sp);
  const Eigen::MatrixXd diff = a.noisy.values - a.clean.values;
  const double sigma = std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
  const double target = 0.03 * a.clean.values.cwiseAbs().maxCoeff();
  EXPECT_NEAR(a.noise_sigma, target, 1e-15);
  EXPECT_LT(std::abs(sigma - target), 0.05 * target);

  const auto b = simulate_measurement(p, sp);
  EXPECT_EQ(a.noisy.values, b.noisy.values);
  sp.seed = 100;
  EXPECT_NE(a.noisy.values, simulate_measurement(p, sp).noisy.values);
}

TEST(Measurement, TwoProjectionsPerTimeStep) {
  SimulationParams sp;
  sp.resolution = 16;
  const auto sino = simulate_measurement(DynamicPhantom::standard(), sp).clean;
  ASSERT_EQ(sino.projections(), 360);
  EXPECT_EQ(sino.detectors(), ParallelGeometry::default_detectors(16, 16));
  std::vector<int> uses(180, 0);
  for (Index t : sino.time_index)
    ++uses[static_cast<std::size_t>(t)];
  for (int u : uses)
    EXPECT_EQ(u, 2);
  EXPECT_EQ(sino.time_index[0], 0);
  EXPECT_EQ(sino.time_index[359], 179);
  EXPECT_DOUBLE_EQ(sino.angles_deg[359], 359.0);
}

TEST(Measurement, OversampledStaticMatchesDirectProjection) {
  // A smooth-edged large object: oversampled simulation stays close to a
  // direct projection at target resolution.
  SimulationParams sp;
  sp.resolution = 64;
  sp.projections = 4;
  sp.step_deg = 45.0;
  sp.time_steps = 1;
  sp.noise = 0.0;
  const auto p = disk(0.6);
  const auto s = simulate_measurement(p, sp).clean;
  const Eigen::VectorXd direct =
      ParallelProjector(geometry(64, {0.0, 45.0, 90.0, 135.0})).apply(render_phantom(p, 0.0, 64, 64));
  EXPECT_LT((s.values.reshaped() - direct).norm(), 0.05 * direct.norm());
}

TEST(Batching, StatedArithmetic) {
  Sinogram s;
  s.values = Eigen::MatrixXd::Zero(3, 360);
  for (Index a = 0; a < 360; ++a) {
    s.angles_deg.push_back(static_cast<double>(a));
    s.time_index.push_back(a / 2);
  }
  s.time_steps = 180;
  const auto plan = batch_sinogram(s, 32, 19, 11);
  EXPECT_EQ(plan.stride(), 8);
  EXPECT_EQ(plan.batches[0].start, 0);
  EXPECT_EQ(plan.batches[0].end(), 19);
  EXPECT_EQ(plan.batches[1].start, 8);
  EXPECT_EQ(plan.batches[1].end(), 27);
  EXPECT_EQ(plan.batches[31].start, 248);
  EXPECT_EQ(plan.batches[31].end(), 267);
  EXPECT_EQ(plan.batches[0].reference_time, 4);

  const auto disjoint = batch_sinogram(s, 10, 12, 0);
  for (std::size_t i = 1; i < disjoint.batches.size(); ++i)
    EXPECT_EQ(disjoint.batches[i].start, disjoint.batches[i - 1].end());

  EXPECT_THROW(batch_sinogram(s, 45, 19, 11), ParameterError);
  EXPECT_THROW(batch_sinogram(s, 4, 10, 10), ParameterError);

  const auto spread = batch_sinogram(s, 32, 19, 11, true);
  EXPECT_EQ(spread.batches.front().start, 0);
  EXPECT_EQ(spread.batches.back().end(), 360);

  const auto back = batch_plan_from_json(to_json(plan));
  ASSERT_EQ(back.frames(), 32);
  EXPECT_EQ(back.batches[5].start, plan.batches[5].start);
  EXPECT_EQ(back.batches[5].reference_time, plan.batches[5].reference_time);
}

TEST(Batching, ProblemUsesBatchColumns) {
  SimulationParams sp;
  sp.resolution = 16;
  sp.projections = 40;
  sp.time_steps = 20;
  sp.noise = 0.0;
  const auto p = DynamicPhantom::standard();
  const auto sino = simulate_measurement(p, sp).clean;
  const auto plan = batch_sinogram(sino, 4, 10, 2);
  const auto prob = make_batched_problem(sino, plan, 16, 16);
  ASSERT_EQ(prob.op.frames(), 4);
  EXPECT_EQ(prob.data[1].size(), 10 * sino.detectors());
  EXPECT_EQ(prob.data[1].head(sino.detectors()), sino.values.col(8));
  const auto refs = reference_frames(p, plan, sp.time_steps, 16, 2);
  EXPECT_EQ(refs.frames(), 4);
  EXPECT_GE(refs.data()[0], 0.0);
}

TEST(Batching, SinogramFileRoundTrip) {
  SimulationParams sp;
  sp.resolution = 16;
  sp.projections = 12;
  sp.time_steps = 6;
  const auto s = simulate_measurement(DynamicPhantom::standard(), sp).noisy;
  const auto dir = std::filesystem::temp_directory_path() / "mrlr_test_tomo";
  std::filesystem::create_directories(dir);
  write_sinogram(dir / "sino", s);
  const auto back = read_sinogram(dir / "sino");
  EXPECT_EQ(back.values, s.values);
  EXPECT_EQ(back.time_index, s.time_index);
  EXPECT_EQ(back.angles_deg, s.angles_deg);
}
