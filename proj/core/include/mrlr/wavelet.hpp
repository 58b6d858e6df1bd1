#pragma once

#include "mrlr/casorati.hpp"
#include "mrlr/sequence.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mrlr {

/// Orthonormal two-channel filter bank defined by its lowpass filter h.
/// The highpass is the quadrature mirror g[k] = (-1)^k h[L-1-k].
class WaveletFilter {
public:
  /// Throws ParameterError if h is not an orthonormal lowpass filter
  /// (sum sqrt(2), unit energy, orthogonal to its even shifts).
  WaveletFilter(std::string name, std::vector<double> lowpass);

  /// Daubechies filter with n vanishing moments (length 2n); n in {1,2,3}.
  static WaveletFilter daubechies(int vanishing_moments);
  /// "haar", "db1", "db2" or "db3".
  static WaveletFilter from_name(const std::string &name);

  const std::string &name() const { return name_; }
  std::span<const double> lowpass() const { return lowpass_; }
  std::span<const double> highpass() const { return highpass_; }
  Index length() const { return static_cast<Index>(lowpass_.size()); }

private:
  std::string name_;
  std::vector<double> lowpass_;
  std::vector<double> highpass_;
};

struct Subband {
  int scale = 0;
  Direction direction = Direction::LL;
  Eigen::MatrixXd coeffs;
};

/// J-level periodized 2D decomposition of one rows x cols frame.
///
/// Subbands are stored as: scale 0 LL, then for j = 1..J (coarse to fine)
/// LH, HL, HH. Detail subbands at scale j are (rows, cols) / 2^(J-j+1);
/// LL is (rows, cols) / 2^J.
struct WaveletDecomposition {
  int levels = 0;
  Index rows = 0;
  Index cols = 0;
  std::vector<Subband> subbands;

  const Subband &at(int scale, Direction direction) const;
  Subband &at(int scale, Direction direction);
  double squared_norm() const;
};

/// Coefficient inner product of two decompositions with identical pyramids.
double dot(const WaveletDecomposition &a, const WaveletDecomposition &b);

/// Zero decomposition with the pyramid shape of a rows x cols frame.
WaveletDecomposition zero_decomposition(Index rows, Index cols, int levels);

/// Forward transform. rows and cols must be divisible by 2^levels.
WaveletDecomposition dwt2(const Eigen::Ref<const Eigen::MatrixXd> &frame,
                          const WaveletFilter &filter, int levels);
/// Inverse (and adjoint) of dwt2.
Eigen::MatrixXd idwt2(const WaveletDecomposition &dec, const WaveletFilter &filter);

std::vector<WaveletDecomposition> dwt_sequence(const ImageSequence &f, const WaveletFilter &filter,
                                               int levels);
ImageSequence idwt_sequence(std::span<const WaveletDecomposition> decs,
                            const WaveletFilter &filter);

/// Stacks subband `index` (storage order) of every frame into a sequence.
ImageSequence subband_sequence(std::span<const WaveletDecomposition> decs, std::size_t index);
/// Writes the frames of `s` back into subband `index` of each decomposition.
void set_subband_sequence(std::span<WaveletDecomposition> decs, std::size_t index,
                          const ImageSequence &s);

/// Core array format with a subband manifest in the sidecar meta:
/// shape [T, rows*cols, 1]; per frame the subbands are concatenated in
/// storage order, each flattened column-major.
void write_decompositions(const std::filesystem::path &base,
                          std::span<const WaveletDecomposition> decs, const WaveletFilter &filter);
std::vector<WaveletDecomposition> read_decompositions(const std::filesystem::path &base);

} // namespace mrlr
