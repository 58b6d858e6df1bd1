#include "mrlr/operator.hpp"

#include "mrlr/error.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace mrlr::tomo {

ScaledIdentity::ScaledIdentity(Index rows, Index cols, double scale)
    : rows_(rows), cols_(cols), scale_(scale) {
  if (rows < 1 || cols < 1)
    throw ShapeError("ScaledIdentity: empty frame");
}

Eigen::VectorXd ScaledIdentity::apply(const Eigen::Ref<const Eigen::MatrixXd> &frame) const {
  if (frame.rows() != rows_ || frame.cols() != cols_)
    throw ShapeError("ScaledIdentity::apply: frame size mismatch");
  return scale_ * frame.reshaped();
}

Eigen::MatrixXd ScaledIdentity::adjoint(const Eigen::Ref<const Eigen::VectorXd> &data) const {
  if (data.size() != rows_ * cols_)
    throw ShapeError("ScaledIdentity::adjoint: data size mismatch");
  return scale_ * data.reshaped(rows_, cols_);
}

DenseFrameOperator::DenseFrameOperator(Eigen::MatrixXd matrix, Index rows, Index cols)
    : matrix_(std::move(matrix)), rows_(rows), cols_(cols) {
  if (matrix_.cols() != rows * cols)
    throw ShapeError("DenseFrameOperator: matrix columns must equal rows*cols");
}

Eigen::VectorXd DenseFrameOperator::apply(const Eigen::Ref<const Eigen::MatrixXd> &frame) const {
  if (frame.rows() != rows_ || frame.cols() != cols_)
    throw ShapeError("DenseFrameOperator::apply: frame size mismatch");
  return matrix_ * frame.reshaped();
}

Eigen::MatrixXd DenseFrameOperator::adjoint(const Eigen::Ref<const Eigen::VectorXd> &data) const {
  if (data.size() != matrix_.rows())
    throw ShapeError("DenseFrameOperator::adjoint: data size mismatch");
  return (matrix_.transpose() * data).reshaped(rows_, cols_);
}

BlockDiagonalOperator::BlockDiagonalOperator(
    std::vector<std::shared_ptr<const FrameOperator>> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty())
    throw ShapeError("BlockDiagonalOperator: no blocks");
  rows_ = blocks_.front()->frame_rows();
  cols_ = blocks_.front()->frame_cols();
  for (const auto &b : blocks_)
    if (!b || b->frame_rows() != rows_ || b->frame_cols() != cols_)
      throw ShapeError("BlockDiagonalOperator: blocks act on different frame sizes");
}

MeasurementSet BlockDiagonalOperator::apply(const ImageSequence &f) const {
  if (f.frames() != frames() || f.rows() != rows_ || f.cols() != cols_)
    throw ShapeError("BlockDiagonalOperator::apply: sequence shape mismatch");
  MeasurementSet out(blocks_.size());
#pragma omp parallel for schedule(static)
  for (Index t = 0; t < frames(); ++t)
    out[static_cast<std::size_t>(t)] = block(t).apply(f.frame(t));
  return out;
}

ImageSequence BlockDiagonalOperator::adjoint(const MeasurementSet &m) const {
  if (static_cast<Index>(m.size()) != frames())
    throw ShapeError("BlockDiagonalOperator::adjoint: measurement count mismatch");
  for (Index t = 0; t < frames(); ++t)
    if (m[static_cast<std::size_t>(t)].size() != block(t).output_size())
      throw ShapeError("BlockDiagonalOperator::adjoint: measurement size mismatch");
  ImageSequence f(frames(), rows_, cols_);
#pragma omp parallel for schedule(static)
  for (Index t = 0; t < frames(); ++t)
    f.frame(t) = block(t).adjoint(m[static_cast<std::size_t>(t)]);
  return f;
}

double squared_norm(const MeasurementSet &m) {
  double acc = 0.0;
  for (const auto &v : m)
    acc += v.squaredNorm();
  return acc;
}

double estimate_op_norm(const FrameOperator &op, int iterations, std::uint64_t seed) {
  if (iterations < 1)
    throw ParameterError("estimate_op_norm: need at least one iteration");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(op.frame_rows(), op.frame_cols());
  for (Index i = 0; i < x.size(); ++i)
    x(i) = normal(rng);
  x /= x.norm();
  double estimate = 0.0;
  for (int k = 0; k < iterations; ++k) {
    Eigen::MatrixXd y = op.adjoint(op.apply(x));
    const double n = y.norm();
    if (n == 0.0)
      return 0.0;
    // ||A^T A x|| for unit x converges to the largest eigenvalue of A^T A.
    estimate = n;
    x = y / n;
  }
  return std::sqrt(estimate);
}

double estimate_op_norm(const BlockDiagonalOperator &op, int iterations, std::uint64_t seed) {
  std::map<const FrameOperator *, double> cache;
  double best = 0.0;
  for (const auto &b : op.blocks()) {
    auto it = cache.find(b.get());
    if (it == cache.end())
      it = cache.emplace(b.get(), estimate_op_norm(*b, iterations, seed)).first;
    best = std::max(best, it->second);
  }
  return best;
}

} // namespace mrlr::tomo
