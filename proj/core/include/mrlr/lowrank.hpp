#pragma once

#include "mrlr/casorati.hpp"
#include "mrlr/sequence.hpp"

#include <Eigen/Core>

#include <vector>

namespace mrlr {

/// F = U diag(sigma) V^T with orthonormal columns in U (N x r) and V (T x r).
struct SvdFactors {
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd V;

  Index rank() const { return sigma.size(); }
  Eigen::MatrixXd reconstruct() const;
};

/// Economy SVD with sigma non-increasing. Singular values below
/// 1e-12 * sigma_1 are set to 0. Signs are fixed so that the first
/// non-negligible entry of every U column is positive.
///
/// With `full_bases` the square orthogonal U (N x N) and V (T x T) are
/// returned instead; sigma still has min(N, T) entries.
SvdFactors thin_svd(const Eigen::MatrixXd &F, bool full_bases = false);

double nuclear_norm(const Eigen::MatrixXd &F);

/// sign(x) * max(|x| - tau, 0). Throws ParameterError for tau < 0.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd &x, double tau);

/// Singular value thresholding: the prox of tau * ||.||_*.
Eigen::MatrixXd svt(const Eigen::MatrixXd &F, double tau);

/// Diagonal of an m x n matrix as a vector of length min(m, n).
Eigen::VectorXd diag_extract(const Eigen::MatrixXd &M);
/// Adjoint of diag_extract: m x n matrix with y on its diagonal.
Eigen::MatrixXd diag_embed(const Eigen::VectorXd &y, Index rows, Index cols);

/// Concatenated singular values with the segment each patch occupies.
struct SpectrumSegment {
  int scale = 0;
  Direction direction = Direction::LL;
  Index patch = 0;
  Index offset = 0;
  Index length = 0;
};

struct SingularSpectrum {
  Eigen::VectorXd values;
  std::vector<SpectrumSegment> segments;
};

/// Result of the global low-rank analysis L f: the spectrum
/// diag(U^T M(f) V) together with the bases it was taken in.
struct LowRankAnalysis {
  SingularSpectrum spectrum;
  SvdFactors bases;
};

/// L f = diag(U^T M(f) V) with U, V from the SVD of M(f). Entries in
/// [-1e-12, 0) caused by rounding are clamped to 0.
LowRankAnalysis op_L(const ImageSequence &f, bool full_bases = false);

/// L x for fixed bases; linear in x, no clamping.
Eigen::VectorXd apply_L(const ImageSequence &x, const SvdFactors &bases);

/// L* y = M^-1(U diag*(y) V^T).
ImageSequence op_L_adjoint(const Eigen::VectorXd &y, const SvdFactors &bases, Index rows,
                           Index cols);

} // namespace mrlr
