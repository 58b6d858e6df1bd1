#include "mrlr/projector.hpp"

#include "mrlr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mrlr::tomo {

Index ParallelGeometry::default_detectors(Index rows, Index cols) {
  return static_cast<Index>(std::ceil(std::numbers::sqrt2 * static_cast<double>(std::max(rows, cols))));
}

ParallelGeometry ParallelGeometry::standard(Index rows, Index cols, std::vector<double> angles_deg) {
  ParallelGeometry g;
  g.angles_deg = std::move(angles_deg);
  g.detectors = default_detectors(rows, cols);
  g.spacing = 1.0;
  g.rows = rows;
  g.cols = cols;
  return g;
}

double ParallelGeometry::detector_offset(Index k) const {
  return (static_cast<double>(k) - 0.5 * static_cast<double>(detectors - 1)) * spacing;
}

void ParallelGeometry::validate() const {
  if (detectors < 1)
    throw ParameterError("ParallelGeometry: need at least one detector");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw ParameterError("ParallelGeometry: detector spacing must be positive");
  if (rows < 1 || cols < 1)
    throw ShapeError("ParallelGeometry: empty image");
  for (double a : angles_deg)
    if (!std::isfinite(a))
      throw ParameterError("ParallelGeometry: non-finite angle");
}

ParallelProjector::ParallelProjector(ParallelGeometry geometry) : geometry_(std::move(geometry)) {
  geometry_.validate();
  for (double a : geometry_.angles_deg) {
    const double rad = a * std::numbers::pi / 180.0;
    cos_.push_back(std::cos(rad));
    sin_.push_back(std::sin(rad));
  }
}

template <bool Transpose>
void ParallelProjector::project(double *image, double *sino) const {
  const Index R = geometry_.rows;
  const Index C = geometry_.cols;
  const Index D = geometry_.detectors;
  const double row_center = 0.5 * static_cast<double>(R - 1);
  const double col_center = 0.5 * static_cast<double>(C - 1);

  for (Index a = 0; a < geometry_.projections(); ++a) {
    const double c = cos_[static_cast<std::size_t>(a)];
    const double s = sin_[static_cast<std::size_t>(a)];
    double *row = sino + a * D;
    if (std::abs(s) >= std::abs(c)) {
      // March over columns: on column x the ray has y = (off - x c) / s.
      const double weight = 1.0 / std::abs(s);
      for (Index k = 0; k < D; ++k) {
        const double off = geometry_.detector_offset(k);
        double acc = 0.0;
        const double value = Transpose ? row[k] * weight : 0.0;
        for (Index j = 0; j < C; ++j) {
          const double x = static_cast<double>(j) - col_center;
          const double r = row_center - (off - x * c) / s;
          const double fl = std::floor(r);
          const Index i0 = static_cast<Index>(fl);
          if (i0 < -1 || i0 >= R)
            continue;
          const double w1 = r - fl;
          const double w0 = 1.0 - w1;
          double *col = image + j * R;
          if constexpr (Transpose) {
            if (i0 >= 0) col[i0] += w0 * value;
            if (i0 + 1 < R) col[i0 + 1] += w1 * value;
          } else {
            if (i0 >= 0) acc += w0 * col[i0];
            if (i0 + 1 < R) acc += w1 * col[i0 + 1];
          }
        }
        if constexpr (!Transpose)
          row[k] = acc * weight;
      }
    } else {
      // March over rows: on row y the ray has x = (off - y s) / c.
      const double weight = 1.0 / std::abs(c);
      for (Index k = 0; k < D; ++k) {
        const double off = geometry_.detector_offset(k);
        double acc = 0.0;
        const double value = Transpose ? row[k] * weight : 0.0;
        for (Index i = 0; i < R; ++i) {
          const double y = row_center - static_cast<double>(i);
          const double q = col_center + (off - y * s) / c;
          const double fl = std::floor(q);
          const Index j0 = static_cast<Index>(fl);
          if (j0 < -1 || j0 >= C)
            continue;
          const double w1 = q - fl;
          const double w0 = 1.0 - w1;
          if constexpr (Transpose) {
            if (j0 >= 0) image[i + j0 * R] += w0 * value;
            if (j0 + 1 < C) image[i + (j0 + 1) * R] += w1 * value;
          } else {
            if (j0 >= 0) acc += w0 * image[i + j0 * R];
            if (j0 + 1 < C) acc += w1 * image[i + (j0 + 1) * R];
          }
        }
        if constexpr (!Transpose)
          row[k] = acc * weight;
      }
    }
  }
}

Eigen::VectorXd ParallelProjector::apply(const Eigen::Ref<const Eigen::MatrixXd> &frame) const {
  if (frame.rows() != geometry_.rows || frame.cols() != geometry_.cols)
    throw ShapeError("ParallelProjector::apply: frame size mismatch");
  Eigen::MatrixXd dense = frame;
  Eigen::VectorXd out(output_size());
  project<false>(dense.data(), out.data());
  return out;
}

Eigen::MatrixXd ParallelProjector::adjoint(const Eigen::Ref<const Eigen::VectorXd> &data) const {
  if (data.size() != output_size())
    throw ShapeError("ParallelProjector::adjoint: data size mismatch");
  Eigen::VectorXd dense = data;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(geometry_.rows, geometry_.cols);
  project<true>(out.data(), dense.data());
  return out;
}

double estimate_op_norm(const ParallelGeometry &geometry, Index frames) {
  if (frames < 1)
    throw ParameterError("estimate_op_norm: need at least one frame");
  return estimate_op_norm(ParallelProjector(geometry));
}

} // namespace mrlr::tomo
