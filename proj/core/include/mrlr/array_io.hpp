#pragma once

#include "mrlr/sequence.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mrlr {

/// On-disk array: `<base>.bin` holds little-endian float64 values,
/// `<base>.json` the sidecar
///   {"shape": [...], "order": "column-major", "dtype": "f64", "meta": {...}}
///
/// For a 2D shape [rows, cols] element (i, j) is at i + j*rows. For a 3D
/// shape [T, rows, cols] frames are stored one after another and each frame
/// is column-major, i.e. (t, i, j) is at t*rows*cols + i + j*rows.
struct ArrayFile {
  std::vector<std::int64_t> shape;
  std::vector<double> data;
  nlohmann::json meta = nlohmann::json::object();
};

std::filesystem::path bin_path(const std::filesystem::path &base);
std::filesystem::path sidecar_path(const std::filesystem::path &base);

void write_array(const std::filesystem::path &base, std::span<const double> data,
                 std::span<const std::int64_t> shape,
                 const nlohmann::json &meta = nlohmann::json::object());
ArrayFile read_array(const std::filesystem::path &base);

void write_sequence(const std::filesystem::path &base, const ImageSequence &f,
                    const nlohmann::json &meta = nlohmann::json::object());
ImageSequence read_sequence(const std::filesystem::path &base);

/// Writes a JSON document with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path &path, const nlohmann::json &doc);
nlohmann::json read_json(const std::filesystem::path &path);

} // namespace mrlr
