#pragma once

#include "mrlr/casorati.hpp"
#include "mrlr/lowrank.hpp"
#include "mrlr/sequence.hpp"
#include "mrlr/wavelet.hpp"

#include <memory>
#include <string>
#include <vector>

namespace mrlr {

/// Sum of nuclear norms of the patched Casorati matrices of `a`.
double patch_nuclear_sum(const ImageSequence &a, const PatchGrid &grid);
/// Replaces every patched Casorati matrix of `a` by svt(F_k, tau).
ImageSequence patch_svt(const ImageSequence &a, const PatchGrid &grid, double tau);

// Global low rank: lambda * ||M f||_*.
double glr_value(const ImageSequence &f, double lambda);
ImageSequence glr_prox(const ImageSequence &f, double tau);

// Local low rank over an image-domain layout (a single grid covering the frame).
double llr_value(const ImageSequence &f, const PatchLayout &layout, double lambda);
ImageSequence llr_prox(const ImageSequence &f, const PatchLayout &layout, double tau);

// Multiresolution low rank: patched Casorati matrices of every subband
// sequence of the per-frame wavelet transform, one grid per subband.
double mrlr_value(const ImageSequence &f, const WaveletFilter &filter, int levels,
                  const PatchLayout &layout, double lambda);
ImageSequence mrlr_prox(const ImageSequence &f, const WaveletFilter &filter, int levels,
                        const PatchLayout &layout, double tau);

/// Spectra of all patches plus the per-patch SVD bases they were taken in.
/// Segments follow layout order (scale-major, LH/HL/HH, row-major grid).
struct PatchedAnalysis {
  SingularSpectrum spectrum;
  std::vector<SvdFactors> bases;
};

/// The unitary analysis operator L_{W,p} f evaluated with the bases of f.
/// `levels` = 0 gives the image-domain (LLR) operator L_p.
PatchedAnalysis mrlr_analysis(const ImageSequence &f, const WaveletFilter &filter, int levels,
                              const PatchLayout &layout, bool full_bases = false);
/// L_{W,p} x for frozen bases.
Eigen::VectorXd mrlr_apply(const ImageSequence &x, const WaveletFilter &filter, int levels,
                           const PatchLayout &layout, const PatchedAnalysis &bases);
/// Adjoint of mrlr_apply.
ImageSequence mrlr_adjoint(const Eigen::VectorXd &y, const WaveletFilter &filter, int levels,
                           const PatchLayout &layout, const PatchedAnalysis &bases, Index rows,
                           Index cols);

/// Convex penalty R with a closed-form prox, as consumed by the solvers.
class Regularizer {
public:
  virtual ~Regularizer() = default;
  virtual std::string name() const = 0;
  /// R(f) without the regularization weight.
  virtual double value(const ImageSequence &f) const = 0;
  /// argmin_x 1/2 ||x - f||^2 + tau R(x).
  virtual ImageSequence prox(const ImageSequence &f, double tau) const = 0;
};

class GlobalLowRank final : public Regularizer {
public:
  std::string name() const override { return "glr"; }
  double value(const ImageSequence &f) const override;
  ImageSequence prox(const ImageSequence &f, double tau) const override;
};

class LocalLowRank final : public Regularizer {
public:
  explicit LocalLowRank(PatchLayout layout);
  std::string name() const override { return "llr"; }
  double value(const ImageSequence &f) const override;
  ImageSequence prox(const ImageSequence &f, double tau) const override;
  const PatchLayout &layout() const { return layout_; }

private:
  PatchLayout layout_;
};

class MultiresolutionLowRank final : public Regularizer {
public:
  MultiresolutionLowRank(WaveletFilter filter, int levels, PatchLayout layout);
  std::string name() const override { return "mrlr"; }
  double value(const ImageSequence &f) const override;
  ImageSequence prox(const ImageSequence &f, double tau) const override;
  const PatchLayout &layout() const { return layout_; }

private:
  WaveletFilter filter_;
  int levels_;
  PatchLayout layout_;
};

/// ||W f_t||_1 summed over frames (all subbands, including LL).
class WaveletSparsity final : public Regularizer {
public:
  WaveletSparsity(WaveletFilter filter, int levels);
  std::string name() const override { return "wavelet-l1"; }
  double value(const ImageSequence &f) const override;
  ImageSequence prox(const ImageSequence &f, double tau) const override;

private:
  WaveletFilter filter_;
  int levels_;
};

} // namespace mrlr
