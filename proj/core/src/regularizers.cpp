#include "mrlr/regularizers.hpp"

#include "mrlr/error.hpp"

#include <numeric>

namespace mrlr {

namespace {

const PatchGrid &image_grid(const ImageSequence &f, const PatchLayout &layout) {
  if (layout.entries().size() != 1)
    throw LayoutError("image-domain layout must have exactly one patch grid");
  const PatchGrid &g = layout.entries().front();
  if (g.array_rows() != f.rows() || g.array_cols() != f.cols())
    throw LayoutError("layout grid " + std::to_string(g.array_rows()) + "x" +
                      std::to_string(g.array_cols()) + " does not cover the " +
                      std::to_string(f.rows()) + "x" + std::to_string(f.cols()) + " frame");
  return g;
}

// Grid for subband `index` of the pyramid; checks it covers the subband.
const PatchGrid &subband_grid(const WaveletDecomposition &dec, std::size_t index,
                              const PatchLayout &layout) {
  const Subband &s = dec.subbands[index];
  const PatchGrid &g = layout.find(s.scale, s.direction);
  if (g.array_rows() != s.coeffs.rows() || g.array_cols() != s.coeffs.cols())
    throw LayoutError("layout grid for scale " + std::to_string(s.scale) + " " +
                      std::string(to_string(s.direction)) + " does not tile the " +
                      std::to_string(s.coeffs.rows()) + "x" + std::to_string(s.coeffs.cols()) +
                      " subband");
  return g;
}

void require_layout_matches(const WaveletDecomposition &dec, const PatchLayout &layout) {
  if (layout.entries().size() != dec.subbands.size())
    throw LayoutError("layout has " + std::to_string(layout.entries().size()) +
                      " grids but the pyramid has " + std::to_string(dec.subbands.size()) +
                      " subbands");
  for (std::size_t i = 0; i < dec.subbands.size(); ++i)
    subband_grid(dec, i, layout);
}

std::vector<WaveletDecomposition> checked_transform(const ImageSequence &f,
                                                    const WaveletFilter &filter, int levels,
                                                    const PatchLayout &layout) {
  std::vector<WaveletDecomposition> decs = dwt_sequence(f, filter, levels);
  require_layout_matches(decs.front(), layout);
  return decs;
}

double sum_of(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0); }

} // namespace

double patch_nuclear_sum(const ImageSequence &a, const PatchGrid &grid) {
  const std::vector<CasoratiMatrix> patches = extract_patches(a, grid);
  std::vector<double> norms(patches.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < patches.size(); ++k)
    norms[k] = nuclear_norm(patches[k]);
  return sum_of(norms);
}

ImageSequence patch_svt(const ImageSequence &a, const PatchGrid &grid, double tau) {
  if (!(tau >= 0.0))
    throw ParameterError("patch_svt: tau must be non-negative");
  std::vector<CasoratiMatrix> patches = extract_patches(a, grid);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < patches.size(); ++k)
    patches[k] = svt(patches[k], tau);
  return assemble_patches(patches, grid, a.rows(), a.cols());
}

double glr_value(const ImageSequence &f, double lambda) { return lambda * nuclear_norm(casorati(f)); }

ImageSequence glr_prox(const ImageSequence &f, double tau) {
  return inverse_casorati(svt(casorati(f), tau), f.rows(), f.cols());
}

double llr_value(const ImageSequence &f, const PatchLayout &layout, double lambda) {
  return lambda * patch_nuclear_sum(f, image_grid(f, layout));
}

ImageSequence llr_prox(const ImageSequence &f, const PatchLayout &layout, double tau) {
  return patch_svt(f, image_grid(f, layout), tau);
}

double mrlr_value(const ImageSequence &f, const WaveletFilter &filter, int levels,
                  const PatchLayout &layout, double lambda) {
  const auto decs = checked_transform(f, filter, levels, layout);
  double total = 0.0;
  for (std::size_t i = 0; i < decs.front().subbands.size(); ++i)
    total += patch_nuclear_sum(subband_sequence(decs, i), subband_grid(decs.front(), i, layout));
  return lambda * total;
}

ImageSequence mrlr_prox(const ImageSequence &f, const WaveletFilter &filter, int levels,
                        const PatchLayout &layout, double tau) {
  if (!(tau >= 0.0))
    throw ParameterError("mrlr_prox: tau must be non-negative");
  auto decs = checked_transform(f, filter, levels, layout);
  for (std::size_t i = 0; i < decs.front().subbands.size(); ++i) {
    const PatchGrid &g = subband_grid(decs.front(), i, layout);
    set_subband_sequence(decs, i, patch_svt(subband_sequence(decs, i), g, tau));
  }
  return idwt_sequence(decs, filter);
}

PatchedAnalysis mrlr_analysis(const ImageSequence &f, const WaveletFilter &filter, int levels,
                              const PatchLayout &layout, bool full_bases) {
  const auto decs = checked_transform(f, filter, levels, layout);
  PatchedAnalysis out;
  std::vector<double> values;
  for (std::size_t i = 0; i < decs.front().subbands.size(); ++i) {
    const PatchGrid &g = subband_grid(decs.front(), i, layout);
    const auto patches = extract_patches(subband_sequence(decs, i), g);
    for (std::size_t k = 0; k < patches.size(); ++k) {
      SvdFactors svd = thin_svd(patches[k], full_bases);
      const Index r = std::min(svd.U.cols(), svd.V.cols());
      // diag(U^T F V) rather than sigma so that the value is the analysis
      // operator applied with these bases.
      const Eigen::MatrixXd FV = patches[k] * svd.V.leftCols(r);
      out.spectrum.segments.push_back({g.scale, g.direction, static_cast<Index>(k),
                                       static_cast<Index>(values.size()), r});
      for (Index c = 0; c < r; ++c)
        values.push_back(std::max(0.0, svd.U.col(c).dot(FV.col(c))));
      out.bases.push_back(std::move(svd));
    }
  }
  out.spectrum.values = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                          static_cast<Index>(values.size()));
  return out;
}

Eigen::VectorXd mrlr_apply(const ImageSequence &x, const WaveletFilter &filter, int levels,
                           const PatchLayout &layout, const PatchedAnalysis &bases) {
  const auto decs = checked_transform(x, filter, levels, layout);
  Eigen::VectorXd y(bases.spectrum.values.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < decs.front().subbands.size(); ++i) {
    const PatchGrid &g = subband_grid(decs.front(), i, layout);
    const auto patches = extract_patches(subband_sequence(decs, i), g);
    for (const auto &P : patches) {
      if (seg >= bases.bases.size())
        throw ShapeError("mrlr_apply: fewer bases than patches");
      const SvdFactors &b = bases.bases[seg];
      const SpectrumSegment &s = bases.spectrum.segments[seg];
      if (b.U.rows() != P.rows() || b.V.rows() != P.cols())
        throw ShapeError("mrlr_apply: basis dimensions do not match patch");
      const Eigen::MatrixXd PV = P * b.V.leftCols(s.length);
      for (Index c = 0; c < s.length; ++c)
        y(s.offset + c) = b.U.col(c).dot(PV.col(c));
      ++seg;
    }
  }
  if (seg != bases.bases.size())
    throw ShapeError("mrlr_apply: more bases than patches");
  return y;
}

ImageSequence mrlr_adjoint(const Eigen::VectorXd &y, const WaveletFilter &filter, int levels,
                           const PatchLayout &layout, const PatchedAnalysis &bases, Index rows,
                           Index cols) {
  if (y.size() != bases.spectrum.values.size())
    throw ShapeError("mrlr_adjoint: spectrum length mismatch");
  if (bases.bases.empty())
    throw ShapeError("mrlr_adjoint: no bases");
  const Index T = bases.bases.front().V.rows();
  std::vector<WaveletDecomposition> decs(static_cast<std::size_t>(T),
                                         zero_decomposition(rows, cols, levels));
  require_layout_matches(decs.front(), layout);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < decs.front().subbands.size(); ++i) {
    const PatchGrid &g = subband_grid(decs.front(), i, layout);
    std::vector<CasoratiMatrix> patches;
    for (Index k = 0; k < g.count(); ++k, ++seg) {
      if (seg >= bases.bases.size())
        throw ShapeError("mrlr_adjoint: fewer bases than patches");
      const SvdFactors &b = bases.bases[seg];
      const SpectrumSegment &s = bases.spectrum.segments[seg];
      patches.push_back(b.U.leftCols(s.length) * y.segment(s.offset, s.length).asDiagonal() *
                        b.V.leftCols(s.length).transpose());
    }
    set_subband_sequence(decs, i,
                         assemble_patches(patches, g, g.array_rows(), g.array_cols()));
  }
  return idwt_sequence(decs, filter);
}

double GlobalLowRank::value(const ImageSequence &f) const { return glr_value(f, 1.0); }

ImageSequence GlobalLowRank::prox(const ImageSequence &f, double tau) const {
  return glr_prox(f, tau);
}

LocalLowRank::LocalLowRank(PatchLayout layout) : layout_(std::move(layout)) {
  if (layout_.entries().size() != 1)
    throw LayoutError("LocalLowRank: layout must have exactly one patch grid");
}

double LocalLowRank::value(const ImageSequence &f) const { return llr_value(f, layout_, 1.0); }

ImageSequence LocalLowRank::prox(const ImageSequence &f, double tau) const {
  return llr_prox(f, layout_, tau);
}

MultiresolutionLowRank::MultiresolutionLowRank(WaveletFilter filter, int levels,
                                               PatchLayout layout)
    : filter_(std::move(filter)), levels_(levels), layout_(std::move(layout)) {
  if (levels_ < 0)
    throw ParameterError("MultiresolutionLowRank: negative level count");
}

double MultiresolutionLowRank::value(const ImageSequence &f) const {
  return mrlr_value(f, filter_, levels_, layout_, 1.0);
}

ImageSequence MultiresolutionLowRank::prox(const ImageSequence &f, double tau) const {
  return mrlr_prox(f, filter_, levels_, layout_, tau);
}

WaveletSparsity::WaveletSparsity(WaveletFilter filter, int levels)
    : filter_(std::move(filter)), levels_(levels) {
  if (levels_ < 0)
    throw ParameterError("WaveletSparsity: negative level count");
}

double WaveletSparsity::value(const ImageSequence &f) const {
  double total = 0.0;
  for (const auto &d : dwt_sequence(f, filter_, levels_))
    for (const auto &s : d.subbands)
      total += s.coeffs.cwiseAbs().sum();
  return total;
}

ImageSequence WaveletSparsity::prox(const ImageSequence &f, double tau) const {
  if (!(tau >= 0.0))
    throw ParameterError("WaveletSparsity::prox: tau must be non-negative");
  auto decs = dwt_sequence(f, filter_, levels_);
  for (auto &d : decs)
    for (auto &s : d.subbands)
      s.coeffs = s.coeffs.unaryExpr([tau](double c) {
        const double m = std::abs(c) - tau;
        return m > 0.0 ? std::copysign(m, c) : 0.0;
      });
  return idwt_sequence(decs, filter_);
}

} // namespace mrlr
