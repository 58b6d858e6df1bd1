#include "mrlr/casorati.hpp"

#include "mrlr/error.hpp"

#include <string>

namespace mrlr {

CasoratiMatrix casorati(const ImageSequence &f) {
  // Frames are already column-major and contiguous, so the Casorati matrix
  // is the storage buffer read as N x T.
  return Eigen::Map<const Eigen::MatrixXd>(f.data().data(), f.frame_size(), f.frames());
}

ImageSequence inverse_casorati(const CasoratiMatrix &F, Index rows, Index cols) {
  if (rows < 1 || cols < 1 || F.rows() != rows * cols)
    throw ShapeError("inverse_casorati: matrix has " + std::to_string(F.rows()) +
                     " rows, expected " + std::to_string(rows) + "*" + std::to_string(cols));
  ImageSequence f(F.cols(), rows, cols);
  Eigen::Map<Eigen::MatrixXd>(f.data().data(), F.rows(), F.cols()) = F;
  return f;
}

std::string_view to_string(Direction d) {
  switch (d) {
  case Direction::LL: return "LL";
  case Direction::LH: return "LH";
  case Direction::HL: return "HL";
  case Direction::HH: return "HH";
  }
  return "?";
}

Direction direction_from_string(std::string_view s) {
  if (s == "LL") return Direction::LL;
  if (s == "LH") return Direction::LH;
  if (s == "HL") return Direction::HL;
  if (s == "HH") return Direction::HH;
  throw ParameterError("unknown subband direction '" + std::string(s) + "'");
}

PatchGrid make_patch_grid(Index rows, Index cols, Index patch_rows, Index patch_cols, int scale,
                          Direction direction) {
  if (patch_rows < 1 || patch_cols < 1 || rows < 1 || cols < 1 || rows % patch_rows != 0 ||
      cols % patch_cols != 0)
    throw LayoutError("patch size " + std::to_string(patch_rows) + "x" +
                      std::to_string(patch_cols) + " does not tile a " + std::to_string(rows) +
                      "x" + std::to_string(cols) + " array (scale " + std::to_string(scale) +
                      ", " + std::string(to_string(direction)) + ")");
  return {scale, direction, patch_rows, patch_cols, rows / patch_rows, cols / patch_cols};
}

PatchLayout::PatchLayout(std::vector<PatchGrid> entries) : entries_(std::move(entries)) {
  for (const auto &e : entries_)
    if (e.patch_rows < 1 || e.patch_cols < 1 || e.grid_rows < 1 || e.grid_cols < 1)
      throw LayoutError("PatchLayout: empty patch grid entry");
}

PatchLayout PatchLayout::single(Index rows, Index cols, Index patch_rows, Index patch_cols) {
  return PatchLayout({make_patch_grid(rows, cols, patch_rows, patch_cols)});
}

PatchLayout PatchLayout::pyramid(Index rows, Index cols, int levels,
                                 std::span<const PatchSize> sizes) {
  if (levels < 0)
    throw ParameterError("PatchLayout::pyramid: negative level count");
  if (static_cast<int>(sizes.size()) != levels + 1)
    throw LayoutError("PatchLayout::pyramid: expected " + std::to_string(levels + 1) +
                      " patch sizes (one per scale), got " + std::to_string(sizes.size()));
  const Index div = Index{1} << levels;
  if (rows % div != 0 || cols % div != 0)
    throw ShapeError("PatchLayout::pyramid: " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " is not divisible by 2^" + std::to_string(levels));
  std::vector<PatchGrid> entries;
  entries.push_back(
      make_patch_grid(rows / div, cols / div, sizes[0].rows, sizes[0].cols, 0, Direction::LL));
  for (int j = 1; j <= levels; ++j) {
    // Detail subbands at scale j have the size of the level-(J-j+1) split.
    const Index d = Index{1} << (levels - j + 1);
    for (Direction dir : {Direction::LH, Direction::HL, Direction::HH})
      entries.push_back(make_patch_grid(rows / d, cols / d, sizes[j].rows, sizes[j].cols, j, dir));
  }
  return PatchLayout(std::move(entries));
}

const PatchGrid &PatchLayout::find(int scale, Direction direction) const {
  for (const auto &e : entries_)
    if (e.scale == scale && e.direction == direction)
      return e;
  throw LayoutError("PatchLayout: no entry for scale " + std::to_string(scale) + " " +
                    std::string(to_string(direction)));
}

Index PatchLayout::total_patches() const {
  Index n = 0;
  for (const auto &e : entries_)
    n += e.count();
  return n;
}

std::vector<CasoratiMatrix> extract_patches(const ImageSequence &a, const PatchGrid &grid) {
  if (a.rows() != grid.array_rows() || a.cols() != grid.array_cols())
    throw LayoutError("extract_patches: grid covers " + std::to_string(grid.array_rows()) + "x" +
                      std::to_string(grid.array_cols()) + " but array is " +
                      std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  const Index T = a.frames();
  const Index p1 = grid.patch_rows;
  const Index p2 = grid.patch_cols;
  std::vector<CasoratiMatrix> patches;
  patches.reserve(static_cast<std::size_t>(grid.count()));
  for (Index gr = 0; gr < grid.grid_rows; ++gr) {
    for (Index gc = 0; gc < grid.grid_cols; ++gc) {
      CasoratiMatrix P(p1 * p2, T);
      for (Index t = 0; t < T; ++t)
        P.col(t) = a.frame(t).block(gr * p1, gc * p2, p1, p2).reshaped();
      patches.push_back(std::move(P));
    }
  }
  return patches;
}

ImageSequence assemble_patches(std::span<const CasoratiMatrix> patches, const PatchGrid &grid,
                               Index rows, Index cols) {
  if (rows != grid.array_rows() || cols != grid.array_cols())
    throw LayoutError("assemble_patches: grid does not cover " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  if (static_cast<Index>(patches.size()) != grid.count() || patches.empty())
    throw ShapeError("assemble_patches: expected " + std::to_string(grid.count()) +
                     " patches, got " + std::to_string(patches.size()));
  const Index T = patches.front().cols();
  const Index p1 = grid.patch_rows;
  const Index p2 = grid.patch_cols;
  for (const auto &P : patches)
    if (P.rows() != p1 * p2 || P.cols() != T)
      throw ShapeError("assemble_patches: inconsistent patch dimensions");
  ImageSequence a(T, rows, cols);
  std::size_t k = 0;
  for (Index gr = 0; gr < grid.grid_rows; ++gr) {
    for (Index gc = 0; gc < grid.grid_cols; ++gc, ++k) {
      for (Index t = 0; t < T; ++t)
        a.frame(t).block(gr * p1, gc * p2, p1, p2) = patches[k].col(t).reshaped(p1, p2);
    }
  }
  return a;
}

} // namespace mrlr
