#pragma once

#include "mrlr/sequence.hpp"

#include <Eigen/Core>

#include <span>
#include <string_view>
#include <vector>

namespace mrlr {

/// N x T matrix whose column t is frame t flattened column-major.
using CasoratiMatrix = Eigen::MatrixXd;

CasoratiMatrix casorati(const ImageSequence &f);
ImageSequence inverse_casorati(const CasoratiMatrix &F, Index rows, Index cols);

/// Wavelet subband direction. LL is the scaling (approximation) band; for
/// image-domain layouts the whole image is treated as LL at scale 0.
///   HL = psi(x1) phi(x2), LH = phi(x1) psi(x2), HH = psi(x1) psi(x2)
/// with x1 the row axis and x2 the column axis.
enum class Direction { LL, LH, HL, HH };

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);

/// Non-overlapping rectangular patch grid over one array (image or subband).
struct PatchGrid {
  int scale = 0;
  Direction direction = Direction::LL;
  Index patch_rows = 1;
  Index patch_cols = 1;
  Index grid_rows = 1;
  Index grid_cols = 1;

  Index array_rows() const { return grid_rows * patch_rows; }
  Index array_cols() const { return grid_cols * patch_cols; }
  Index count() const { return grid_rows * grid_cols; }
  Index patch_size() const { return patch_rows * patch_cols; }
};

/// Builds a grid of p1 x p2 patches over a rows x cols array.
/// Throws LayoutError when the patch size does not tile the array exactly.
PatchGrid make_patch_grid(Index rows, Index cols, Index patch_rows, Index patch_cols,
                          int scale = 0, Direction direction = Direction::LL);

struct PatchSize {
  Index rows = 1;
  Index cols = 1;
};

/// Patch grids for every array the low-rank analysis is applied to.
///
/// Entries are ordered scale-major: scale 0 (LL) first, then for each
/// detail scale j = 1..J the LH, HL and HH subbands.
class PatchLayout {
public:
  PatchLayout() = default;
  explicit PatchLayout(std::vector<PatchGrid> entries);

  /// Image-domain layout: a single grid over the whole frame.
  static PatchLayout single(Index rows, Index cols, Index patch_rows, Index patch_cols);

  /// Wavelet-domain layout for a J-level dyadic pyramid of a rows x cols
  /// frame. sizes[j] is the patch size used at scale j (0 = coarsest).
  static PatchLayout pyramid(Index rows, Index cols, int levels, std::span<const PatchSize> sizes);

  const std::vector<PatchGrid> &entries() const { return entries_; }
  const PatchGrid &find(int scale, Direction direction) const;
  Index total_patches() const;

private:
  std::vector<PatchGrid> entries_;
};

/// Splits each frame of `a` into the patches of `grid`, returning one
/// (p1*p2) x T Casorati matrix per patch in row-major grid order.
std::vector<CasoratiMatrix> extract_patches(const ImageSequence &a, const PatchGrid &grid);

/// Exact inverse of extract_patches.
ImageSequence assemble_patches(std::span<const CasoratiMatrix> patches, const PatchGrid &grid,
                               Index rows, Index cols);

} // namespace mrlr
