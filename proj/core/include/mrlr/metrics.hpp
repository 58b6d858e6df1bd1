#pragma once

#include "mrlr/sequence.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <vector>

namespace mrlr::metrics {

/// ||recon - ref|| / ||ref||.
double relative_l2(const Eigen::Ref<const Eigen::MatrixXd> &recon,
                   const Eigen::Ref<const Eigen::MatrixXd> &ref);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

/// Mean SSIM over all window positions fully inside the image, with
/// Gaussian-weighted local statistics.
double ssim(const Eigen::Ref<const Eigen::MatrixXd> &recon,
            const Eigen::Ref<const Eigen::MatrixXd> &ref, double data_range,
            const SsimParams &params = {});

/// Local SSIM values, one per valid window position.
Eigen::MatrixXd ssim_map(const Eigen::Ref<const Eigen::MatrixXd> &recon,
                         const Eigen::Ref<const Eigen::MatrixXd> &ref, double data_range,
                         const SsimParams &params = {});

struct HaarPsiParams {
  double c = 30.0;
  double alpha = 4.2;
  bool preprocess = true;
};

/// Grayscale HaarPSI of images on the [0, 255] scale.
double haarpsi(const Eigen::Ref<const Eigen::MatrixXd> &recon,
               const Eigen::Ref<const Eigen::MatrixXd> &ref, const HaarPsiParams &params = {});

struct FrameMetrics {
  Index t = 0;
  double rel_l2 = 0.0;
  double ssim = 0.0;
  double haarpsi = 0.0;
};

struct MetricReport {
  std::vector<FrameMetrics> frames;
  double mean_rel_l2 = 0.0;
  double mean_ssim = 0.0;
  double mean_haarpsi = 0.0;
};

/// Per-frame metrics. SSIM uses data_range = max(ref_t) - min(ref_t);
/// HaarPSI sees both frames scaled by 255 / max(ref_t).
MetricReport evaluate(const ImageSequence &recon, const ImageSequence &ref);

/// CSV with header "t,rel_l2,ssim,haarpsi".
void write_metrics_csv(const std::filesystem::path &path, const MetricReport &report);

} // namespace mrlr::metrics
