#pragma once

#include "mrlr/operator.hpp"

#include <vector>

namespace mrlr::tomo {

/// Parallel-beam geometry. Angles are in degrees, counterclockwise; the
/// detector is centered on the image with `spacing` in pixel units.
///
/// Pixel (i, j) of a rows x cols frame sits at x = j - (cols-1)/2,
/// y = (rows-1)/2 - i. The ray of angle theta and detector offset s is
/// {s n + t d}, n = (cos theta, sin theta), d = (-sin theta, cos theta).
struct ParallelGeometry {
  std::vector<double> angles_deg;
  Index detectors = 1;
  double spacing = 1.0;
  Index rows = 1;
  Index cols = 1;

  /// ceil(sqrt(2) * max(rows, cols)): covers the image at every angle.
  static Index default_detectors(Index rows, Index cols);
  static ParallelGeometry standard(Index rows, Index cols, std::vector<double> angles_deg);

  Index projections() const { return static_cast<Index>(angles_deg.size()); }
  double detector_offset(Index k) const;
  void validate() const;
};

/// Joseph's method: along every ray, march over the image columns (or rows,
/// whichever the ray is closer to) and linearly interpolate between the two
/// neighbouring pixels. The adjoint applies the same weights transposed.
///
/// Output layout: projection a occupies [a*detectors, (a+1)*detectors).
class ParallelProjector final : public FrameOperator {
public:
  explicit ParallelProjector(ParallelGeometry geometry);

  Index frame_rows() const override { return geometry_.rows; }
  Index frame_cols() const override { return geometry_.cols; }
  Index output_size() const override { return geometry_.projections() * geometry_.detectors; }
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::MatrixXd> &frame) const override;
  Eigen::MatrixXd adjoint(const Eigen::Ref<const Eigen::VectorXd> &data) const override;

  const ParallelGeometry &geometry() const { return geometry_; }

private:
  template <bool Transpose>
  void project(double *image, double *sino) const;

  ParallelGeometry geometry_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// ||A|| for the projector of `geometry`; a block-diagonal operator of
/// `frames` identical blocks has the same norm.
double estimate_op_norm(const ParallelGeometry &geometry, Index frames = 1);

} // namespace mrlr::tomo
