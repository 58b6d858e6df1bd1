#include "mrlr/phantom.hpp"

#include "mrlr/error.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace mrlr::tomo {

namespace {

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

} // namespace

namespace {

// A component frozen at one time instant.
struct Placed {
  ShapeKind shape;
  double attenuation;
  double cx, cy, a, b, c, s, shear;

  Placed(const PhantomComponent &p, double tau)
      : shape(p.shape), attenuation(p.attenuation), cx(p.cx), cy(p.cy), a(p.a), b(p.b), c(0),
        s(0), shear(0) {
    double angle = p.angle_deg;
    switch (p.motion.kind) {
    case MotionKind::Static:
      break;
    case MotionKind::Translation:
      cx += tau * p.motion.dx;
      cy += tau * p.motion.dy;
      break;
    case MotionKind::PeriodicScaling: {
      const double k = p.motion.amplitude * std::sin(2.0 * std::numbers::pi * p.motion.periods * tau);
      a *= 1.0 + k;
      b *= 1.0 - k;
      break;
    }
    case MotionKind::Shear:
      shear = tau * p.motion.shear;
      break;
    case MotionKind::Rotation:
      angle += tau * p.motion.rotation_deg;
      break;
    }
    c = std::cos(deg2rad(angle));
    s = std::sin(deg2rad(angle));
  }

  bool contains(double x, double y) const {
    const double px = x - cx;
    const double py = y - cy;
    // Body frame, then undo the shear [1 k; 0 1].
    double u = c * px + s * py;
    const double v = -s * px + c * py;
    u -= shear * v;
    switch (shape) {
    case ShapeKind::Disk:
      return u * u + v * v <= a * a;
    case ShapeKind::Ellipse:
      return (u / a) * (u / a) + (v / b) * (v / b) <= 1.0;
    case ShapeKind::Rectangle:
      return std::abs(u) <= a && std::abs(v) <= b;
    case ShapeKind::Annulus: {
      const double r2 = u * u + v * v;
      return r2 <= a * a && r2 > b * b;
    }
    }
    return false;
  }
};

} // namespace

bool PhantomComponent::contains(double x, double y, double tau) const {
  return Placed(*this, tau).contains(x, y);
}

double DynamicPhantom::max_value() const {
  double total = 0.0;
  for (const auto &c : components)
    total += c.attenuation;
  return total;
}

void DynamicPhantom::validate() const {
  for (const auto &c : components) {
    if (!(c.attenuation >= 0.0))
      throw ParameterError("DynamicPhantom: attenuation must be non-negative");
    if (!(c.a > 0.0) || (c.shape != ShapeKind::Disk && !(c.b > 0.0)))
      throw ParameterError("DynamicPhantom: component sizes must be positive");
    if (c.shape == ShapeKind::Annulus && !(c.b < c.a))
      throw ParameterError("DynamicPhantom: annulus inner radius must be below the outer one");
    if (c.motion.kind == MotionKind::PeriodicScaling && !(std::abs(c.motion.amplitude) < 1.0))
      throw ParameterError("DynamicPhantom: scaling amplitude must be below 1");
  }
}

DynamicPhantom DynamicPhantom::standard() {
  DynamicPhantom p;
  PhantomComponent ring;
  ring.shape = ShapeKind::Annulus;
  ring.attenuation = 0.5;
  ring.a = 0.9;
  ring.b = 0.8;
  p.components.push_back(ring);

  PhantomComponent background;
  background.shape = ShapeKind::Disk;
  background.attenuation = 0.1;
  background.a = 0.8;
  p.components.push_back(background);

  PhantomComponent mover;
  mover.shape = ShapeKind::Disk;
  mover.attenuation = 0.5;
  mover.cx = -0.45;
  mover.cy = -0.45;
  mover.a = 0.12;
  mover.motion.kind = MotionKind::Translation;
  mover.motion.dx = 0.9;
  p.components.push_back(mover);

  PhantomComponent pulse;
  pulse.shape = ShapeKind::Ellipse;
  pulse.attenuation = 0.4;
  pulse.cx = -0.35;
  pulse.cy = 0.25;
  pulse.a = 0.22;
  pulse.b = 0.14;
  pulse.angle_deg = 30.0;
  pulse.motion.kind = MotionKind::PeriodicScaling;
  pulse.motion.amplitude = 0.25;
  pulse.motion.periods = 1.0;
  p.components.push_back(pulse);

  PhantomComponent slab;
  slab.shape = ShapeKind::Rectangle;
  slab.attenuation = 0.3;
  slab.cx = 0.35;
  slab.cy = 0.25;
  slab.a = 0.15;
  slab.b = 0.1;
  slab.motion.kind = MotionKind::Shear;
  slab.motion.shear = 0.5;
  p.components.push_back(slab);

  PhantomComponent square;
  square.shape = ShapeKind::Rectangle;
  square.attenuation = 0.6;
  square.a = 0.1;
  square.b = 0.1;
  square.motion.kind = MotionKind::Rotation;
  square.motion.rotation_deg = 15.0;
  p.components.push_back(square);
  return p;
}

DynamicPhantom DynamicPhantom::from_name(const std::string &name) {
  if (name == "standard" || name == "simulated")
    return standard();
  throw ParameterError("unknown phantom preset '" + name + "'");
}

Eigen::MatrixXd render_phantom(const DynamicPhantom &phantom, double tau, Index rows, Index cols,
                               int subsamples) {
  if (rows < 1 || cols < 1)
    throw ShapeError("render_phantom: empty image");
  if (!(tau >= 0.0 && tau <= 1.0))
    throw ParameterError("render_phantom: tau must lie in [0, 1]");
  if (subsamples < 1)
    throw ParameterError("render_phantom: need at least one sample per pixel axis");
  std::vector<Placed> placed;
  for (const auto &c : phantom.components)
    placed.emplace_back(c, tau);

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  const double hr = 0.5 * static_cast<double>(rows);
  const double hc = 0.5 * static_cast<double>(cols);
  const double step = 1.0 / subsamples;
  const double weight = 1.0 / (subsamples * subsamples);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      double value = 0.0;
      for (int q = 0; q < subsamples; ++q) {
        const double xj = static_cast<double>(j) - 0.5 + (q + 0.5) * step;
        const double x = (xj - 0.5 * static_cast<double>(cols - 1)) / hc;
        for (int r = 0; r < subsamples; ++r) {
          const double yi = static_cast<double>(i) - 0.5 + (r + 0.5) * step;
          const double y = (0.5 * static_cast<double>(rows - 1) - yi) / hr;
          for (const auto &c : placed)
            if (c.contains(x, y))
              value += c.attenuation;
        }
      }
      out(i, j) = value * weight;
    }
  return out;
}

Eigen::MatrixXd block_average(const Eigen::MatrixXd &image, Index factor) {
  if (factor < 1 || image.rows() % factor != 0 || image.cols() % factor != 0)
    throw ShapeError("block_average: factor must divide the image size");
  if (factor == 1)
    return image;
  const Index rows = image.rows() / factor;
  const Index cols = image.cols() / factor;
  Eigen::MatrixXd out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      out(i, j) = image.block(i * factor, j * factor, factor, factor).mean();
  return out;
}

Eigen::MatrixXd render_reference(const DynamicPhantom &phantom, double tau, Index rows,
                                 Index cols, Index oversample) {
  return block_average(
      render_phantom(phantom, tau, rows * oversample, cols * oversample, kDefaultSubsamples),
      oversample);
}

} // namespace mrlr::tomo
