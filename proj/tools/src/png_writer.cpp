#include "mrlr_cli/png_writer.hpp"

#include "mrlr/error.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace mrlr::cli {

std::vector<std::uint8_t> to_gray8(const Eigen::MatrixXd &frame, double lo, double hi) {
  if (!(hi > lo))
    throw ParameterError("png window: upper bound must exceed the lower one");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(frame.size()));
  const double scale = 255.0 / (hi - lo);
  for (Eigen::Index i = 0; i < frame.rows(); ++i)
    for (Eigen::Index j = 0; j < frame.cols(); ++j) {
      const double v = std::clamp((frame(i, j) - lo) * scale, 0.0, 255.0);
      out[static_cast<std::size_t>(i * frame.cols() + j)] = static_cast<std::uint8_t>(std::lround(v));
    }
  return out;
}

namespace {

struct FileCloser {
  void operator()(std::FILE *f) const { std::fclose(f); }
};

} // namespace

void write_png_gray8(const std::filesystem::path &path, const std::vector<std::uint8_t> &pixels,
                     int rows, int cols) {
  if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != pixels.size())
    throw ShapeError("write_png_gray8: pixel count mismatch");
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file)
    throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < rows; ++r)
    png_write_row(png, pixels.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::vector<std::uint8_t> read_png_gray8(const std::filesystem::path &path, int &rows, int &cols) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file)
    throw IoError("cannot read " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed reading " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string() + " is not an 8-bit grayscale PNG");
  }
  rows = static_cast<int>(png_get_image_height(png, info));
  cols = static_cast<int>(png_get_image_width(png, info));
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r)
    png_read_row(png, pixels.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols), nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return pixels;
}

} // namespace mrlr::cli
