#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace mrlr {

using Index = Eigen::Index;

/// A sequence of T real frames of size rows x cols.
///
/// Frames are stored contiguously one after another; within a frame the
/// row index runs fastest (column-major), so frame t occupies
/// data[t*rows*cols, (t+1)*rows*cols).
class ImageSequence {
public:
  ImageSequence() = default;
  ImageSequence(Index frames, Index rows, Index cols);
  ImageSequence(Index frames, Index rows, Index cols, std::vector<double> data);

  Index frames() const { return frames_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index frame_size() const { return rows_ * cols_; }
  Index size() const { return frames_ * rows_ * cols_; }
  bool empty() const { return size() == 0; }

  double &operator()(Index t, Index i, Index j) { return data_[offset(t, i, j)]; }
  double operator()(Index t, Index i, Index j) const { return data_[offset(t, i, j)]; }

  Eigen::Map<Eigen::MatrixXd> frame(Index t);
  Eigen::Map<const Eigen::MatrixXd> frame(Index t) const;

  /// All values as one vector of length size().
  Eigen::Map<Eigen::VectorXd> flat();
  Eigen::Map<const Eigen::VectorXd> flat() const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double> release() && { return std::move(data_); }

  bool same_shape(const ImageSequence &other) const;
  bool all_finite() const;
  double norm() const;

  /// Elementwise projection onto the non-negative orthant.
  void clamp_nonnegative();

  friend bool operator==(const ImageSequence &a, const ImageSequence &b);

private:
  std::size_t offset(Index t, Index i, Index j) const {
    return static_cast<std::size_t>(t * rows_ * cols_ + j * rows_ + i);
  }

  Index frames_ = 0;
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

/// Euclidean inner product over all frames.
double dot(const ImageSequence &a, const ImageSequence &b);

/// Throws ShapeError unless a and b have identical dimensions.
void require_same_shape(const ImageSequence &a, const ImageSequence &b, const char *what);

} // namespace mrlr
