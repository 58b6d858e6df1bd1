#include "mrlr/wavelet.hpp"

#include "mrlr/array_io.hpp"
#include "mrlr/error.hpp"

#include <cmath>
#include <numeric>

namespace mrlr {

namespace {

constexpr double kFilterTol = 1e-12;

void require_pyramid(Index rows, Index cols, int levels, const char *what) {
  if (levels < 0)
    throw ParameterError(std::string(what) + ": negative level count");
  if (levels > 30 || rows < 1 || cols < 1 || rows % (Index{1} << levels) != 0 ||
      cols % (Index{1} << levels) != 0)
    throw ShapeError(std::string(what) + ": " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " is not divisible by 2^" + std::to_string(levels));
}

// One periodized analysis step along a strided line of even length n:
// low[k] = sum_m h[m] x[(2k+m) mod n], high[k] likewise with g.
void analyze_line(const double *x, Index stride, Index n, std::span<const double> h,
                  std::span<const double> g, double *low, double *high, Index out_stride) {
  const Index half = n / 2;
  const Index L = static_cast<Index>(h.size());
  for (Index k = 0; k < half; ++k) {
    double a = 0.0, d = 0.0;
    for (Index m = 0; m < L; ++m) {
      const double v = x[((2 * k + m) % n) * stride];
      a += h[m] * v;
      d += g[m] * v;
    }
    low[k * out_stride] = a;
    high[k * out_stride] = d;
  }
}

// Transpose of analyze_line.
void synthesize_line(const double *low, const double *high, Index in_stride, Index n,
                     std::span<const double> h, std::span<const double> g, double *x,
                     Index stride) {
  const Index half = n / 2;
  const Index L = static_cast<Index>(h.size());
  for (Index i = 0; i < n; ++i)
    x[i * stride] = 0.0;
  for (Index k = 0; k < half; ++k) {
    const double a = low[k * in_stride];
    const double d = high[k * in_stride];
    for (Index m = 0; m < L; ++m)
      x[((2 * k + m) % n) * stride] += h[m] * a + g[m] * d;
  }
}

} // namespace

WaveletFilter::WaveletFilter(std::string name, std::vector<double> lowpass)
    : name_(std::move(name)), lowpass_(std::move(lowpass)) {
  const auto L = lowpass_.size();
  if (L < 2 || L % 2 != 0)
    throw ParameterError("WaveletFilter: lowpass length must be even and >= 2");
  const double sum = std::accumulate(lowpass_.begin(), lowpass_.end(), 0.0);
  if (std::abs(sum - std::sqrt(2.0)) > kFilterTol)
    throw ParameterError("WaveletFilter: lowpass does not sum to sqrt(2)");
  for (std::size_t shift = 0; shift < L; shift += 2) {
    double acc = 0.0;
    for (std::size_t k = 0; k + shift < L; ++k)
      acc += lowpass_[k] * lowpass_[k + shift];
    const double expected = shift == 0 ? 1.0 : 0.0;
    if (std::abs(acc - expected) > kFilterTol)
      throw ParameterError("WaveletFilter: lowpass is not orthonormal to its even shifts");
  }
  highpass_.resize(L);
  for (std::size_t k = 0; k < L; ++k)
    highpass_[k] = (k % 2 == 0 ? 1.0 : -1.0) * lowpass_[L - 1 - k];
}

WaveletFilter WaveletFilter::daubechies(int n) {
  const double r2 = std::sqrt(2.0);
  switch (n) {
  case 1:
    return {"db1", {1.0 / r2, 1.0 / r2}};
  case 2: {
    const double r3 = std::sqrt(3.0);
    const double s = 4.0 * r2;
    return {"db2", {(1 + r3) / s, (3 + r3) / s, (3 - r3) / s, (1 - r3) / s}};
  }
  case 3: {
    const double a = std::sqrt(10.0);
    const double b = std::sqrt(5.0 + 2.0 * a);
    const double s = 16.0 * r2;
    return {"db3",
            {(1 + a + b) / s, (5 + a + 3 * b) / s, (10 - 2 * a + 2 * b) / s,
             (10 - 2 * a - 2 * b) / s, (5 + a - 3 * b) / s, (1 + a - b) / s}};
  }
  default:
    throw ParameterError("daubechies: unsupported number of vanishing moments " +
                         std::to_string(n) + " (supported: 1, 2, 3)");
  }
}

WaveletFilter WaveletFilter::from_name(const std::string &name) {
  if (name == "haar" || name == "db1") return daubechies(1);
  if (name == "db2") return daubechies(2);
  if (name == "db3") return daubechies(3);
  throw ParameterError("unknown wavelet '" + name + "'");
}

const Subband &WaveletDecomposition::at(int scale, Direction direction) const {
  for (const auto &s : subbands)
    if (s.scale == scale && s.direction == direction)
      return s;
  throw ShapeError("WaveletDecomposition: no subband at scale " + std::to_string(scale) + " " +
                   std::string(to_string(direction)));
}

Subband &WaveletDecomposition::at(int scale, Direction direction) {
  return const_cast<Subband &>(std::as_const(*this).at(scale, direction));
}

double WaveletDecomposition::squared_norm() const {
  double acc = 0.0;
  for (const auto &s : subbands)
    acc += s.coeffs.squaredNorm();
  return acc;
}

double dot(const WaveletDecomposition &a, const WaveletDecomposition &b) {
  if (a.subbands.size() != b.subbands.size())
    throw ShapeError("dot: decompositions have different pyramids");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.subbands.size(); ++i) {
    const auto &x = a.subbands[i].coeffs;
    const auto &y = b.subbands[i].coeffs;
    if (x.rows() != y.rows() || x.cols() != y.cols())
      throw ShapeError("dot: subband dimensions differ");
    acc += x.cwiseProduct(y).sum();
  }
  return acc;
}

WaveletDecomposition zero_decomposition(Index rows, Index cols, int levels) {
  require_pyramid(rows, cols, levels, "zero_decomposition");
  WaveletDecomposition dec;
  dec.levels = levels;
  dec.rows = rows;
  dec.cols = cols;
  const Index c = Index{1} << levels;
  dec.subbands.push_back({0, Direction::LL, Eigen::MatrixXd::Zero(rows / c, cols / c)});
  for (int j = 1; j <= levels; ++j) {
    const Index d = Index{1} << (levels - j + 1);
    for (Direction dir : {Direction::LH, Direction::HL, Direction::HH})
      dec.subbands.push_back({j, dir, Eigen::MatrixXd::Zero(rows / d, cols / d)});
  }
  return dec;
}

WaveletDecomposition dwt2(const Eigen::Ref<const Eigen::MatrixXd> &frame,
                          const WaveletFilter &filter, int levels) {
  require_pyramid(frame.rows(), frame.cols(), levels, "dwt2");
  WaveletDecomposition dec = zero_decomposition(frame.rows(), frame.cols(), levels);
  const auto h = filter.lowpass();
  const auto g = filter.highpass();

  Eigen::MatrixXd approx = frame;
  for (int level = 1; level <= levels; ++level) {
    const Index r = approx.rows();
    const Index c = approx.cols();
    const Index hr = r / 2;
    const Index hc = c / 2;
    // Along x2 (within each row): low/high halves in x2.
    Eigen::MatrixXd lo2(r, hc), hi2(r, hc);
    for (Index i = 0; i < r; ++i)
      analyze_line(approx.data() + i, r, c, h, g, lo2.data() + i, hi2.data() + i, r);
    // Along x1 (within each column).
    Eigen::MatrixXd ll(hr, hc), hl(hr, hc), lh(hr, hc), hh(hr, hc);
    for (Index j = 0; j < hc; ++j) {
      analyze_line(lo2.data() + j * r, 1, r, h, g, ll.data() + j * hr, hl.data() + j * hr, 1);
      analyze_line(hi2.data() + j * r, 1, r, h, g, lh.data() + j * hr, hh.data() + j * hr, 1);
    }
    const int scale = levels - level + 1;
    dec.at(scale, Direction::LH).coeffs = std::move(lh);
    dec.at(scale, Direction::HL).coeffs = std::move(hl);
    dec.at(scale, Direction::HH).coeffs = std::move(hh);
    approx = std::move(ll);
  }
  dec.at(0, Direction::LL).coeffs = std::move(approx);
  return dec;
}

Eigen::MatrixXd idwt2(const WaveletDecomposition &dec, const WaveletFilter &filter) {
  require_pyramid(dec.rows, dec.cols, dec.levels, "idwt2");
  const int J = dec.levels;
  if (dec.subbands.size() != static_cast<std::size_t>(1 + 3 * J))
    throw ShapeError("idwt2: expected " + std::to_string(1 + 3 * J) + " subbands");
  {
    const WaveletDecomposition ref = zero_decomposition(dec.rows, dec.cols, J);
    for (std::size_t i = 0; i < ref.subbands.size(); ++i) {
      const auto &s = dec.subbands[i];
      const auto &e = ref.subbands[i];
      if (s.scale != e.scale || s.direction != e.direction || s.coeffs.rows() != e.coeffs.rows() ||
          s.coeffs.cols() != e.coeffs.cols())
        throw ShapeError("idwt2: subband " + std::to_string(i) + " is inconsistent with a " +
                         std::to_string(dec.rows) + "x" + std::to_string(dec.cols) + " " +
                         std::to_string(J) + "-level pyramid");
    }
  }
  const auto h = filter.lowpass();
  const auto g = filter.highpass();

  Eigen::MatrixXd approx = dec.at(0, Direction::LL).coeffs;
  for (int scale = 1; scale <= J; ++scale) {
    const auto &lh = dec.at(scale, Direction::LH).coeffs;
    const auto &hl = dec.at(scale, Direction::HL).coeffs;
    const auto &hh = dec.at(scale, Direction::HH).coeffs;
    const Index hr = approx.rows();
    const Index hc = approx.cols();
    const Index r = 2 * hr;
    const Index c = 2 * hc;
    Eigen::MatrixXd lo2(r, hc), hi2(r, hc);
    for (Index j = 0; j < hc; ++j) {
      synthesize_line(approx.data() + j * hr, hl.data() + j * hr, 1, r, h, g, lo2.data() + j * r,
                      1);
      synthesize_line(lh.data() + j * hr, hh.data() + j * hr, 1, r, h, g, hi2.data() + j * r, 1);
    }
    Eigen::MatrixXd out(r, c);
    for (Index i = 0; i < r; ++i)
      synthesize_line(lo2.data() + i, hi2.data() + i, r, c, h, g, out.data() + i, r);
    approx = std::move(out);
  }
  return approx;
}

std::vector<WaveletDecomposition> dwt_sequence(const ImageSequence &f, const WaveletFilter &filter,
                                               int levels) {
  require_pyramid(f.rows(), f.cols(), levels, "dwt_sequence");
  std::vector<WaveletDecomposition> decs(static_cast<std::size_t>(f.frames()));
#pragma omp parallel for schedule(static)
  for (Index t = 0; t < f.frames(); ++t)
    decs[static_cast<std::size_t>(t)] = dwt2(f.frame(t), filter, levels);
  return decs;
}

ImageSequence idwt_sequence(std::span<const WaveletDecomposition> decs,
                            const WaveletFilter &filter) {
  if (decs.empty())
    throw ShapeError("idwt_sequence: no frames");
  ImageSequence f(static_cast<Index>(decs.size()), decs.front().rows, decs.front().cols);
  for (const auto &d : decs)
    if (d.rows != f.rows() || d.cols != f.cols() || d.levels != decs.front().levels)
      throw ShapeError("idwt_sequence: frames have different pyramids");
#pragma omp parallel for schedule(static)
  for (Index t = 0; t < f.frames(); ++t)
    f.frame(t) = idwt2(decs[static_cast<std::size_t>(t)], filter);
  return f;
}

ImageSequence subband_sequence(std::span<const WaveletDecomposition> decs, std::size_t index) {
  if (decs.empty() || index >= decs.front().subbands.size())
    throw ShapeError("subband_sequence: index out of range");
  const auto &first = decs.front().subbands[index].coeffs;
  ImageSequence s(static_cast<Index>(decs.size()), first.rows(), first.cols());
  for (std::size_t t = 0; t < decs.size(); ++t) {
    const auto &c = decs[t].subbands.at(index).coeffs;
    if (c.rows() != s.rows() || c.cols() != s.cols())
      throw ShapeError("subband_sequence: frames have different pyramids");
    s.frame(static_cast<Index>(t)) = c;
  }
  return s;
}

void set_subband_sequence(std::span<WaveletDecomposition> decs, std::size_t index,
                          const ImageSequence &s) {
  if (static_cast<Index>(decs.size()) != s.frames())
    throw ShapeError("set_subband_sequence: frame count mismatch");
  for (std::size_t t = 0; t < decs.size(); ++t) {
    auto &c = decs[t].subbands.at(index).coeffs;
    if (c.rows() != s.rows() || c.cols() != s.cols())
      throw ShapeError("set_subband_sequence: subband dimensions differ");
    c = s.frame(static_cast<Index>(t));
  }
}

void write_decompositions(const std::filesystem::path &base,
                          std::span<const WaveletDecomposition> decs, const WaveletFilter &filter) {
  if (decs.empty())
    throw ShapeError("write_decompositions: no frames");
  const auto &d0 = decs.front();
  const Index per_frame = d0.rows * d0.cols;
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(per_frame) * decs.size());
  nlohmann::json manifest = nlohmann::json::array();
  Index offset = 0;
  for (const auto &s : d0.subbands) {
    manifest.push_back({{"scale", s.scale},
                        {"direction", std::string(to_string(s.direction))},
                        {"shape", {s.coeffs.rows(), s.coeffs.cols()}},
                        {"offset", offset}});
    offset += s.coeffs.size();
  }
  for (const auto &d : decs) {
    if (d.rows != d0.rows || d.cols != d0.cols || d.levels != d0.levels)
      throw ShapeError("write_decompositions: frames have different pyramids");
    for (const auto &s : d.subbands)
      data.insert(data.end(), s.coeffs.data(), s.coeffs.data() + s.coeffs.size());
  }
  const nlohmann::json meta = {{"kind", "wavelet_decomposition"},
                               {"wavelet", filter.name()},
                               {"levels", d0.levels},
                               {"rows", d0.rows},
                               {"cols", d0.cols},
                               {"subbands", manifest}};
  const std::int64_t shape[] = {static_cast<std::int64_t>(decs.size()), per_frame, 1};
  write_array(base, data, shape, meta);
}

std::vector<WaveletDecomposition> read_decompositions(const std::filesystem::path &base) {
  const ArrayFile a = read_array(base);
  try {
    const auto &meta = a.meta;
    const int levels = meta.at("levels").get<int>();
    const Index rows = meta.at("rows").get<Index>();
    const Index cols = meta.at("cols").get<Index>();
    if (a.shape.size() != 3 || a.shape[1] != rows * cols)
      throw ShapeError(base.string() + ": shape inconsistent with manifest");
    const WaveletDecomposition tmpl = zero_decomposition(rows, cols, levels);
    const auto &manifest = meta.at("subbands");
    if (manifest.size() != tmpl.subbands.size())
      throw ShapeError(base.string() + ": manifest subband count mismatch");
    std::vector<WaveletDecomposition> decs(static_cast<std::size_t>(a.shape[0]), tmpl);
    for (std::size_t t = 0; t < decs.size(); ++t) {
      const double *frame = a.data.data() + t * static_cast<std::size_t>(rows * cols);
      for (std::size_t i = 0; i < manifest.size(); ++i) {
        auto &s = decs[t].subbands[i];
        const auto &m = manifest[i];
        const auto shape = m.at("shape").get<std::vector<Index>>();
        if (m.at("scale").get<int>() != s.scale ||
            direction_from_string(m.at("direction").get<std::string>()) != s.direction ||
            shape.size() != 2 || shape[0] != s.coeffs.rows() || shape[1] != s.coeffs.cols())
          throw ShapeError(base.string() + ": manifest entry " + std::to_string(i) +
                           " does not match the pyramid");
        const Index off = m.at("offset").get<Index>();
        if (off < 0 || off + s.coeffs.size() > rows * cols)
          throw ShapeError(base.string() + ": manifest offset out of range");
        s.coeffs = Eigen::Map<const Eigen::MatrixXd>(frame + off, s.coeffs.rows(), s.coeffs.cols());
      }
    }
    return decs;
  } catch (const nlohmann::json::exception &e) {
    throw IoError(base.string() + ": malformed decomposition manifest: " + e.what());
  }
}

} // namespace mrlr
