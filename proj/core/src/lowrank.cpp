#include "mrlr/lowrank.hpp"

#include "mrlr/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace mrlr {

namespace {

constexpr double kRelativeFloor = 1e-12;

void require_finite(const Eigen::MatrixXd &F, const char *what) {
  if (!F.allFinite())
    throw NumericError(std::string(what) + ": non-finite input");
}

void fix_signs(SvdFactors &s) {
  const Index k = std::min(s.U.cols(), s.V.cols());
  for (Index c = 0; c < k; ++c) {
    const double scale = s.U.col(c).cwiseAbs().maxCoeff();
    for (Index r = 0; r < s.U.rows(); ++r) {
      const double u = s.U(r, c);
      if (std::abs(u) > kRelativeFloor * scale) {
        if (u < 0) {
          s.U.col(c) *= -1.0;
          s.V.col(c) *= -1.0;
        }
        break;
      }
    }
  }
}

} // namespace

Eigen::MatrixXd SvdFactors::reconstruct() const {
  const Index r = sigma.size();
  return U.leftCols(r) * sigma.asDiagonal() * V.leftCols(r).transpose();
}

SvdFactors thin_svd(const Eigen::MatrixXd &F, bool full_bases) {
  require_finite(F, "thin_svd");
  const unsigned options = full_bases ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                                      : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(F, options);
  SvdFactors out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  if (out.sigma.size() > 0) {
    const double floor = kRelativeFloor * out.sigma(0);
    for (Index i = 0; i < out.sigma.size(); ++i)
      if (out.sigma(i) < floor)
        out.sigma(i) = 0.0;
  }
  fix_signs(out);
  return out;
}

double nuclear_norm(const Eigen::MatrixXd &F) {
  require_finite(F, "nuclear_norm");
  if (F.size() == 0)
    return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(F).singularValues().sum();
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd &x, double tau) {
  if (!(tau >= 0.0))
    throw ParameterError("soft_threshold: tau must be non-negative");
  Eigen::VectorXd y(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double m = std::abs(x(i)) - tau;
    y(i) = m > 0.0 ? std::copysign(m, x(i)) : 0.0;
  }
  return y;
}

Eigen::MatrixXd svt(const Eigen::MatrixXd &F, double tau) {
  if (!(tau >= 0.0))
    throw ParameterError("svt: tau must be non-negative");
  require_finite(F, "svt");
  if (tau == 0.0 || F.size() == 0)
    return F;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(F, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd &s = svd.singularValues();
  Index keep = 0;
  while (keep < s.size() && s(keep) > tau)
    ++keep;
  if (keep == 0)
    return Eigen::MatrixXd::Zero(F.rows(), F.cols());
  const Eigen::VectorXd shrunk = s.head(keep).array() - tau;
  return svd.matrixU().leftCols(keep) * shrunk.asDiagonal() *
         svd.matrixV().leftCols(keep).transpose();
}

Eigen::VectorXd diag_extract(const Eigen::MatrixXd &M) {
  return M.diagonal().head(std::min(M.rows(), M.cols()));
}

Eigen::MatrixXd diag_embed(const Eigen::VectorXd &y, Index rows, Index cols) {
  if (y.size() != std::min(rows, cols))
    throw ShapeError("diag_embed: vector length must be min(rows, cols)");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
  M.diagonal().head(y.size()) = y;
  return M;
}

Eigen::VectorXd apply_L(const ImageSequence &x, const SvdFactors &bases) {
  const CasoratiMatrix X = casorati(x);
  if (bases.U.rows() != X.rows() || bases.V.rows() != X.cols())
    throw ShapeError("apply_L: bases do not match the sequence dimensions");
  const Index r = std::min(bases.U.cols(), bases.V.cols());
  // Only the diagonal of U^T X V is needed: entry i is u_i^T X v_i.
  const Eigen::MatrixXd XV = X * bases.V.leftCols(r);
  Eigen::VectorXd y(r);
  for (Index i = 0; i < r; ++i)
    y(i) = bases.U.col(i).dot(XV.col(i));
  return y;
}

LowRankAnalysis op_L(const ImageSequence &f, bool full_bases) {
  LowRankAnalysis out;
  out.bases = thin_svd(casorati(f), full_bases);
  Eigen::VectorXd y = apply_L(f, out.bases);
  for (Index i = 0; i < y.size(); ++i)
    if (y(i) < 0.0 && y(i) >= -kRelativeFloor * std::max(1.0, out.bases.sigma(0)))
      y(i) = 0.0;
  out.spectrum.values = std::move(y);
  out.spectrum.segments.push_back({0, Direction::LL, 0, 0, out.spectrum.values.size()});
  return out;
}

ImageSequence op_L_adjoint(const Eigen::VectorXd &y, const SvdFactors &bases, Index rows,
                           Index cols) {
  const Index r = std::min(bases.U.cols(), bases.V.cols());
  if (y.size() != r)
    throw ShapeError("op_L_adjoint: spectrum length " + std::to_string(y.size()) +
                     " does not match basis rank " + std::to_string(r));
  if (bases.U.rows() != rows * cols)
    throw ShapeError("op_L_adjoint: bases do not match the frame size");
  const CasoratiMatrix X = bases.U.leftCols(r) * y.asDiagonal() * bases.V.leftCols(r).transpose();
  return inverse_casorati(X, rows, cols);
}

} // namespace mrlr
