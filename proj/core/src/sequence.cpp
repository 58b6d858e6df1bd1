#include "mrlr/sequence.hpp"

#include "mrlr/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mrlr {

namespace {

void check_dims(Index frames, Index rows, Index cols) {
  if (frames < 0 || rows < 0 || cols < 0)
    throw ShapeError("ImageSequence: negative dimension");
}

} // namespace

ImageSequence::ImageSequence(Index frames, Index rows, Index cols)
    : frames_(frames), rows_(rows), cols_(cols) {
  check_dims(frames, rows, cols);
  data_.assign(static_cast<std::size_t>(frames * rows * cols), 0.0);
}

ImageSequence::ImageSequence(Index frames, Index rows, Index cols, std::vector<double> data)
    : frames_(frames), rows_(rows), cols_(cols), data_(std::move(data)) {
  check_dims(frames, rows, cols);
  if (static_cast<Index>(data_.size()) != frames * rows * cols)
    throw ShapeError("ImageSequence: data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(frames) + "x" + std::to_string(rows) +
                     "x" + std::to_string(cols));
}

Eigen::Map<Eigen::MatrixXd> ImageSequence::frame(Index t) {
  return {data_.data() + t * frame_size(), rows_, cols_};
}

Eigen::Map<const Eigen::MatrixXd> ImageSequence::frame(Index t) const {
  return {data_.data() + t * frame_size(), rows_, cols_};
}

Eigen::Map<Eigen::VectorXd> ImageSequence::flat() { return {data_.data(), size()}; }

Eigen::Map<const Eigen::VectorXd> ImageSequence::flat() const { return {data_.data(), size()}; }

bool ImageSequence::same_shape(const ImageSequence &other) const {
  return frames_ == other.frames_ && rows_ == other.rows_ && cols_ == other.cols_;
}

bool ImageSequence::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double ImageSequence::norm() const { return flat().norm(); }

void ImageSequence::clamp_nonnegative() {
  for (double &v : data_)
    v = std::max(v, 0.0);
}

bool operator==(const ImageSequence &a, const ImageSequence &b) {
  return a.same_shape(b) && a.data_ == b.data_;
}

double dot(const ImageSequence &a, const ImageSequence &b) {
  require_same_shape(a, b, "dot");
  return a.flat().dot(b.flat());
}

void require_same_shape(const ImageSequence &a, const ImageSequence &b, const char *what) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(what) + ": sequence shapes differ (" +
                     std::to_string(a.frames()) + "x" + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.frames()) + "x" +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
}

} // namespace mrlr
