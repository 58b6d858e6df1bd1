#include "mrlr/metrics.hpp"

#include "mrlr/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace mrlr::metrics {

namespace {

using Eigen::MatrixXd;

void require_same(const Eigen::Ref<const MatrixXd> &a, const Eigen::Ref<const MatrixXd> &b,
                  const char *what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(what) + ": image sizes differ");
  if (a.size() == 0)
    throw ShapeError(std::string(what) + ": empty image");
}

Eigen::VectorXd gaussian_window(int size, double sigma) {
  Eigen::VectorXd g(size);
  const double c = 0.5 * (size - 1);
  for (int i = 0; i < size; ++i)
    g(i) = std::exp(-0.5 * (i - c) * (i - c) / (sigma * sigma));
  return g / g.sum();
}

// Separable weighted sums over every fully contained window.
MatrixXd filter_valid(const MatrixXd &a, const Eigen::VectorXd &g) {
  const Index w = g.size();
  const Index r = a.rows() - w + 1;
  const Index c = a.cols() - w + 1;
  MatrixXd tmp(r, a.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < r; ++i)
      tmp(i, j) = g.dot(a.col(j).segment(i, w));
  MatrixXd out(r, c);
  for (Index j = 0; j < c; ++j) {
    out.col(j).setZero();
    for (Index k = 0; k < w; ++k)
      out.col(j) += g(k) * tmp.col(j + k);
  }
  return out;
}

// MATLAB-style conv2(a, k, 'same') with zero padding.
MatrixXd conv2_same(const MatrixXd &a, const MatrixXd &k) {
  const Index R = a.rows();
  const Index C = a.cols();
  const Index oi = k.rows() / 2;
  const Index oj = k.cols() / 2;
  MatrixXd out = MatrixXd::Zero(R, C);
  for (Index j = 0; j < C; ++j)
    for (Index i = 0; i < R; ++i) {
      double acc = 0.0;
      for (Index n = 0; n < k.cols(); ++n) {
        const Index sj = j + oj - n;
        if (sj < 0 || sj >= C)
          continue;
        for (Index m = 0; m < k.rows(); ++m) {
          const Index si = i + oi - m;
          if (si >= 0 && si < R)
            acc += a(si, sj) * k(m, n);
        }
      }
      out(i, j) = acc;
    }
  return out;
}

MatrixXd haar_prefilter(const MatrixXd &a) {
  const MatrixXd smooth = conv2_same(a, MatrixXd::Constant(2, 2, 0.25));
  const Index r = (smooth.rows() + 1) / 2;
  const Index c = (smooth.cols() + 1) / 2;
  MatrixXd out(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i)
      out(i, j) = smooth(2 * i, 2 * j);
  return out;
}

// Index s-1 holds the scale-s response to the row-difference filter,
// index 3+s-1 the response to its transpose.
std::vector<MatrixXd> haar_responses(const MatrixXd &a) {
  std::vector<MatrixXd> out(6);
  for (int s = 1; s <= 3; ++s) {
    const Index n = Index{1} << s;
    MatrixXd k = MatrixXd::Constant(n, n, std::ldexp(1.0, -s));
    k.topRows(n / 2) *= -1.0;
    out[static_cast<std::size_t>(s - 1)] = conv2_same(a, k);
    out[static_cast<std::size_t>(s + 2)] = conv2_same(a, k.transpose());
  }
  return out;
}

double sigmoid(double x, double alpha) { return 1.0 / (1.0 + std::exp(-alpha * x)); }
double logit(double x, double alpha) { return std::log(x / (1.0 - x)) / alpha; }

} // namespace

double relative_l2(const Eigen::Ref<const MatrixXd> &recon, const Eigen::Ref<const MatrixXd> &ref) {
  require_same(recon, ref, "relative_l2");
  const double n = ref.norm();
  if (n == 0.0)
    throw NumericError("relative_l2: zero reference");
  return (recon - ref).norm() / n;
}

MatrixXd ssim_map(const Eigen::Ref<const MatrixXd> &recon, const Eigen::Ref<const MatrixXd> &ref,
                  double data_range, const SsimParams &params) {
  require_same(recon, ref, "ssim");
  if (!(data_range > 0.0))
    throw ParameterError("ssim: data range must be positive");
  if (recon.rows() < params.window || recon.cols() < params.window)
    throw ShapeError("ssim: image smaller than the window");
  const Eigen::VectorXd g = gaussian_window(params.window, params.sigma);
  const MatrixXd x = recon;
  const MatrixXd y = ref;
  const MatrixXd mx = filter_valid(x, g);
  const MatrixXd my = filter_valid(y, g);
  const MatrixXd sxx = filter_valid(x.cwiseProduct(x), g) - mx.cwiseProduct(mx);
  const MatrixXd syy = filter_valid(y.cwiseProduct(y), g) - my.cwiseProduct(my);
  const MatrixXd sxy = filter_valid(x.cwiseProduct(y), g) - mx.cwiseProduct(my);
  const double c1 = std::pow(params.k1 * data_range, 2);
  const double c2 = std::pow(params.k2 * data_range, 2);
  const MatrixXd num = (2.0 * mx.cwiseProduct(my).array() + c1) * (2.0 * sxy.array() + c2);
  const MatrixXd den = (mx.array().square() + my.array().square() + c1) *
                       (sxx.array() + syy.array() + c2);
  return num.cwiseQuotient(den);
}

double ssim(const Eigen::Ref<const MatrixXd> &recon, const Eigen::Ref<const MatrixXd> &ref,
            double data_range, const SsimParams &params) {
  return ssim_map(recon, ref, data_range, params).mean();
}

double haarpsi(const Eigen::Ref<const MatrixXd> &recon, const Eigen::Ref<const MatrixXd> &ref,
               const HaarPsiParams &params) {
  require_same(recon, ref, "haarpsi");
  MatrixXd a = ref;
  MatrixXd b = recon;
  if (params.preprocess) {
    a = haar_prefilter(a);
    b = haar_prefilter(b);
  }
  const auto ca = haar_responses(a);
  const auto cb = haar_responses(b);
  const double C = params.c;

  double num = 0.0;
  double den = 0.0;
  for (int ori = 0; ori < 2; ++ori) {
    const std::size_t base = static_cast<std::size_t>(3 * ori);
    for (Index i = 0; i < a.size(); ++i) {
      double ls = 0.0;
      for (std::size_t s = 0; s < 2; ++s) {
        const double pa = std::abs(ca[base + s](i));
        const double pb = std::abs(cb[base + s](i));
        ls += (2.0 * pa * pb + C) / (pa * pa + pb * pb + C);
      }
      ls *= 0.5;
      const double weight = std::max(std::abs(ca[base + 2](i)), std::abs(cb[base + 2](i)));
      num += sigmoid(ls, params.alpha) * weight;
      den += weight;
    }
  }
  if (den == 0.0)
    return 1.0;
  const double v = logit(num / den, params.alpha);
  return v * v;
}

MetricReport evaluate(const ImageSequence &recon, const ImageSequence &ref) {
  require_same_shape(recon, ref, "evaluate");
  MetricReport report;
  for (Index t = 0; t < ref.frames(); ++t) {
    const auto r = ref.frame(t);
    const auto x = recon.frame(t);
    FrameMetrics m;
    m.t = t;
    m.rel_l2 = relative_l2(x, r);
    const double range = r.maxCoeff() - r.minCoeff();
    m.ssim = ssim(x, r, range > 0.0 ? range : 1.0);
    const double peak = r.maxCoeff();
    const double scale = peak > 0.0 ? 255.0 / peak : 1.0;
    m.haarpsi = haarpsi(scale * x, scale * r);
    report.frames.push_back(m);
    report.mean_rel_l2 += m.rel_l2;
    report.mean_ssim += m.ssim;
    report.mean_haarpsi += m.haarpsi;
  }
  if (!report.frames.empty()) {
    const double n = static_cast<double>(report.frames.size());
    report.mean_rel_l2 /= n;
    report.mean_ssim /= n;
    report.mean_haarpsi /= n;
  }
  return report;
}

void write_metrics_csv(const std::filesystem::path &path, const MetricReport &report) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << "t,rel_l2,ssim,haarpsi\n" << std::setprecision(10);
  for (const auto &m : report.frames)
    out << m.t << ',' << m.rel_l2 << ',' << m.ssim << ',' << m.haarpsi << '\n';
  if (!out)
    throw IoError("failed writing " + path.string());
}

} // namespace mrlr::metrics
