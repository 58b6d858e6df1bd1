#pragma once

#include "mrlr/sequence.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <vector>

namespace mrlr::tomo {

/// Linear map A_t from one rows x cols frame to a measurement vector.
class FrameOperator {
public:
  virtual ~FrameOperator() = default;
  virtual Index frame_rows() const = 0;
  virtual Index frame_cols() const = 0;
  virtual Index output_size() const = 0;
  virtual Eigen::VectorXd apply(const Eigen::Ref<const Eigen::MatrixXd> &frame) const = 0;
  virtual Eigen::MatrixXd adjoint(const Eigen::Ref<const Eigen::VectorXd> &data) const = 0;
};

/// scale * I on frames of a given size; scale 0 gives the zero operator.
class ScaledIdentity final : public FrameOperator {
public:
  ScaledIdentity(Index rows, Index cols, double scale = 1.0);
  Index frame_rows() const override { return rows_; }
  Index frame_cols() const override { return cols_; }
  Index output_size() const override { return rows_ * cols_; }
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::MatrixXd> &frame) const override;
  Eigen::MatrixXd adjoint(const Eigen::Ref<const Eigen::VectorXd> &data) const override;

private:
  Index rows_;
  Index cols_;
  double scale_;
};

/// Explicit matrix acting on the column-major flattened frame.
class DenseFrameOperator final : public FrameOperator {
public:
  DenseFrameOperator(Eigen::MatrixXd matrix, Index rows, Index cols);
  Index frame_rows() const override { return rows_; }
  Index frame_cols() const override { return cols_; }
  Index output_size() const override { return matrix_.rows(); }
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::MatrixXd> &frame) const override;
  Eigen::MatrixXd adjoint(const Eigen::Ref<const Eigen::VectorXd> &data) const override;
  const Eigen::MatrixXd &matrix() const { return matrix_; }

private:
  Eigen::MatrixXd matrix_;
  Index rows_;
  Index cols_;
};

/// Measurements of a sequence: one vector per frame.
using MeasurementSet = std::vector<Eigen::VectorXd>;

/// diag(A_1, ..., A_T) acting frame by frame.
class BlockDiagonalOperator {
public:
  BlockDiagonalOperator() = default;
  explicit BlockDiagonalOperator(std::vector<std::shared_ptr<const FrameOperator>> blocks);

  Index frames() const { return static_cast<Index>(blocks_.size()); }
  Index frame_rows() const { return rows_; }
  Index frame_cols() const { return cols_; }
  const FrameOperator &block(Index t) const { return *blocks_[static_cast<std::size_t>(t)]; }
  const std::vector<std::shared_ptr<const FrameOperator>> &blocks() const { return blocks_; }

  MeasurementSet apply(const ImageSequence &f) const;
  ImageSequence adjoint(const MeasurementSet &m) const;

private:
  std::vector<std::shared_ptr<const FrameOperator>> blocks_;
  Index rows_ = 0;
  Index cols_ = 0;
};

/// sum_t ||m_t||^2.
double squared_norm(const MeasurementSet &m);

constexpr int kPowerIterations = 50;
constexpr std::uint64_t kPowerSeed = 20240531;

/// Power-method estimate of the spectral norm ||A||.
double estimate_op_norm(const FrameOperator &op, int iterations = kPowerIterations,
                        std::uint64_t seed = kPowerSeed);
/// Maximum of the block norms (blocks shared by pointer are estimated once).
double estimate_op_norm(const BlockDiagonalOperator &op, int iterations = kPowerIterations,
                        std::uint64_t seed = kPowerSeed);

} // namespace mrlr::tomo
