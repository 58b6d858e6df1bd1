#include "mrlr/array_io.hpp"

#include "mrlr/error.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>

namespace mrlr {

namespace fs = std::filesystem;

namespace {

std::uint64_t byteswap64(std::uint64_t v) {
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) {
    r = (r << 8) | (v & 0xffu);
    v >>= 8;
  }
  return r;
}

std::int64_t element_count(std::span<const std::int64_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::int64_t{1},
                         std::multiplies<std::int64_t>());
}

fs::path with_suffix(const fs::path &base, const char *suffix) {
  fs::path p = base;
  p += suffix;
  return p;
}

} // namespace

fs::path bin_path(const fs::path &base) { return with_suffix(base, ".bin"); }

fs::path sidecar_path(const fs::path &base) { return with_suffix(base, ".json"); }

void write_array(const fs::path &base, std::span<const double> data,
                 std::span<const std::int64_t> shape, const nlohmann::json &meta) {
  if (shape.empty() || std::any_of(shape.begin(), shape.end(), [](auto d) { return d < 0; }))
    throw ShapeError("write_array: invalid shape");
  if (element_count(shape) != static_cast<std::int64_t>(data.size()))
    throw ShapeError("write_array: shape does not match data length");

  std::ofstream bin(bin_path(base), std::ios::binary | std::ios::trunc);
  if (!bin)
    throw IoError("cannot open " + bin_path(base).string() + " for writing");
  if constexpr (std::endian::native == std::endian::little) {
    bin.write(reinterpret_cast<const char *>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
  } else {
    for (double v : data) {
      std::uint64_t u = byteswap64(std::bit_cast<std::uint64_t>(v));
      bin.write(reinterpret_cast<const char *>(&u), sizeof u);
    }
  }
  if (!bin)
    throw IoError("write failed: " + bin_path(base).string());

  nlohmann::json side;
  side["shape"] = std::vector<std::int64_t>(shape.begin(), shape.end());
  side["order"] = "column-major";
  side["dtype"] = "f64";
  if (!meta.is_null() && !meta.empty())
    side["meta"] = meta;
  write_json(sidecar_path(base), side);
}

ArrayFile read_array(const fs::path &base) {
  const nlohmann::json side = read_json(sidecar_path(base));
  ArrayFile out;
  try {
    out.shape = side.at("shape").get<std::vector<std::int64_t>>();
    if (side.at("dtype").get<std::string>() != "f64")
      throw IoError(sidecar_path(base).string() + ": unsupported dtype");
    if (side.at("order").get<std::string>() != "column-major")
      throw IoError(sidecar_path(base).string() + ": unsupported order");
  } catch (const nlohmann::json::exception &e) {
    throw IoError(sidecar_path(base).string() + ": malformed sidecar: " + e.what());
  }
  if (side.contains("meta"))
    out.meta = side["meta"];
  if (out.shape.empty() ||
      std::any_of(out.shape.begin(), out.shape.end(), [](auto d) { return d < 0; }))
    throw IoError(sidecar_path(base).string() + ": invalid shape");

  const auto n = static_cast<std::size_t>(element_count(out.shape));
  std::ifstream bin(bin_path(base), std::ios::binary | std::ios::ate);
  if (!bin)
    throw IoError("cannot open " + bin_path(base).string());
  if (static_cast<std::size_t>(bin.tellg()) != n * sizeof(double))
    throw IoError(bin_path(base).string() + ": size does not match sidecar shape");
  bin.seekg(0);
  out.data.resize(n);
  bin.read(reinterpret_cast<char *>(out.data.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
  if (!bin)
    throw IoError("read failed: " + bin_path(base).string());
  if constexpr (std::endian::native != std::endian::little) {
    for (double &v : out.data)
      v = std::bit_cast<double>(byteswap64(std::bit_cast<std::uint64_t>(v)));
  }
  return out;
}

void write_sequence(const fs::path &base, const ImageSequence &f, const nlohmann::json &meta) {
  const std::int64_t shape[] = {f.frames(), f.rows(), f.cols()};
  write_array(base, f.data(), shape, meta);
}

ImageSequence read_sequence(const fs::path &base) {
  ArrayFile a = read_array(base);
  if (a.shape.size() == 2)
    return ImageSequence(1, a.shape[0], a.shape[1], std::move(a.data));
  if (a.shape.size() != 3)
    throw ShapeError(base.string() + ": expected a [T,rows,cols] array");
  return ImageSequence(a.shape[0], a.shape[1], a.shape[2], std::move(a.data));
}

void write_json(const fs::path &path, const nlohmann::json &doc) {
  std::ofstream os(path, std::ios::trunc);
  if (!os)
    throw IoError("cannot open " + path.string() + " for writing");
  os << doc.dump(2) << '\n';
  if (!os)
    throw IoError("write failed: " + path.string());
}

nlohmann::json read_json(const fs::path &path) {
  std::ifstream is(path);
  if (!is)
    throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception &e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

} // namespace mrlr
