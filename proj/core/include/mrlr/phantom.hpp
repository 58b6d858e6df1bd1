#pragma once

#include "mrlr/sequence.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace mrlr::tomo {

enum class ShapeKind { Disk, Ellipse, Rectangle, Annulus };
enum class MotionKind { Static, Translation, PeriodicScaling, Shear, Rotation };

/// Time law of a component, evaluated at normalized time tau in [0, 1].
struct Motion {
  MotionKind kind = MotionKind::Static;
  double dx = 0.0;           // Translation: center moves by tau*(dx, dy)
  double dy = 0.0;
  double amplitude = 0.0;    // PeriodicScaling: a*(1 + A sin), b*(1 - A sin)
  double periods = 1.0;
  double shear = 0.0;        // Shear: x-shear factor grows from 0 to `shear`
  double rotation_deg = 0.0; // Rotation: angle grows by tau*rotation_deg
};

/// One analytic object in normalized coordinates: the image covers
/// [-1, 1]^2 with x to the right and y up.
///
/// Disk: radius a. Ellipse: semi-axes a, b. Rectangle: half-sizes a, b.
/// Annulus: outer radius a, inner radius b.
struct PhantomComponent {
  ShapeKind shape = ShapeKind::Disk;
  double attenuation = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double a = 0.0;
  double b = 0.0;
  double angle_deg = 0.0;
  Motion motion{};

  bool contains(double x, double y, double tau) const;
};

struct DynamicPhantom {
  std::vector<PhantomComponent> components;

  /// Upper bound on any pixel value.
  double max_value() const;
  void validate() const;

  /// Static annulus and background disk plus a translating disk, a pulsing
  /// ellipse, a shearing rectangle and a slowly rotating square.
  static DynamicPhantom standard();
  static DynamicPhantom from_name(const std::string &name);
};

constexpr int kDefaultSubsamples = 4;

/// Rasterization by area sampling: each pixel averages a subsamples x
/// subsamples grid of point values, a point taking the summed attenuation
/// of the components covering it. Pixel (i, j) is centered at
/// x = (j - (cols-1)/2) / (cols/2), y = ((rows-1)/2 - i) / (rows/2).
/// With subsamples = 1 this is plain point sampling at the centers.
Eigen::MatrixXd render_phantom(const DynamicPhantom &phantom, double tau, Index rows, Index cols,
                               int subsamples = kDefaultSubsamples);

/// Mean over factor x factor blocks; the size must divide.
Eigen::MatrixXd block_average(const Eigen::MatrixXd &image, Index factor);

/// Renders at oversample x the resolution and block-averages back down.
Eigen::MatrixXd render_reference(const DynamicPhantom &phantom, double tau, Index rows,
                                 Index cols, Index oversample);

} // namespace mrlr::tomo
