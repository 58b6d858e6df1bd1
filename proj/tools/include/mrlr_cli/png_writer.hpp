#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace mrlr::cli {

/// Maps [lo, hi] affinely to [0, 255], clamping, with rounding to nearest.
std::vector<std::uint8_t> to_gray8(const Eigen::MatrixXd &frame, double lo, double hi);

/// Writes rows x cols 8-bit grayscale pixels (row-major) as a PNG.
void write_png_gray8(const std::filesystem::path &path, const std::vector<std::uint8_t> &pixels,
                     int rows, int cols);

/// Reads back an 8-bit grayscale PNG (row-major pixels).
std::vector<std::uint8_t> read_png_gray8(const std::filesystem::path &path, int &rows, int &cols);

} // namespace mrlr::cli
