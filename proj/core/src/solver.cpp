#include "mrlr/solver.hpp"

#include "mrlr/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace mrlr::solve {

std::string_view to_string(Method m) {
  switch (m) {
  case Method::GLR: return "glr";
  case Method::LLR: return "llr";
  case Method::MRLR: return "mrlr";
  case Method::LS: return "ls";
  }
  return "?";
}

Method method_from_string(std::string_view s) {
  if (s == "glr") return Method::GLR;
  if (s == "llr") return Method::LLR;
  if (s == "mrlr") return Method::MRLR;
  if (s == "ls" || s == "l+s") return Method::LS;
  throw ParameterError("unknown method '" + std::string(s) + "'");
}

std::string_view to_string(SplitRule r) {
  switch (r) {
  case SplitRule::Proportional: return "proportional";
  case SplitRule::LowRank: return "low-rank";
  case SplitRule::Sparse: return "sparse";
  }
  return "?";
}

SplitRule split_rule_from_string(std::string_view s) {
  if (s == "proportional") return SplitRule::Proportional;
  if (s == "low-rank") return SplitRule::LowRank;
  if (s == "sparse") return SplitRule::Sparse;
  throw ParameterError("unknown split rule '" + std::string(s) + "'");
}

void SolverConfig::validate() const {
  if (!(lambda >= 0.0) || !(lambda_l >= 0.0) || !(lambda_s >= 0.0))
    throw ParameterError("solver: regularization weights must be non-negative");
  if (!(tolerance > 0.0))
    throw ParameterError("solver: tolerance must be positive");
  if (max_iterations < 1)
    throw ParameterError("solver: need at least one iteration");
  if (gamma && !(*gamma > 0.0 && std::isfinite(*gamma)))
    throw ParameterError("solver: gamma must be positive");
  if (levels < 0)
    throw ParameterError("solver: wavelet levels must be non-negative");
  if (!(divergence_factor > 1.0))
    throw ParameterError("solver: divergence factor must exceed 1");
  if ((method == Method::LLR || method == Method::MRLR) && patch_sizes.empty())
    throw ParameterError("solver: patch sizes missing");
}

std::unique_ptr<Regularizer> make_regularizer(const SolverConfig &config, Index rows, Index cols) {
  switch (config.method) {
  case Method::GLR:
    return std::make_unique<GlobalLowRank>();
  case Method::LLR: {
    if (config.patch_sizes.size() != 1)
      throw ParameterError("llr: exactly one patch size expected");
    const PatchSize p = config.patch_sizes.front();
    return std::make_unique<LocalLowRank>(PatchLayout::single(rows, cols, p.rows, p.cols));
  }
  case Method::MRLR: {
    std::vector<PatchSize> sizes = config.patch_sizes;
    if (sizes.size() == 1)
      sizes.assign(static_cast<std::size_t>(config.levels) + 1, sizes.front());
    return std::make_unique<MultiresolutionLowRank>(
        WaveletFilter::from_name(config.wavelet), config.levels,
        PatchLayout::pyramid(rows, cols, config.levels, sizes));
  }
  case Method::LS:
    break;
  }
  throw ParameterError("make_regularizer: method has no single regularizer");
}

double relative_change(const ImageSequence &x_prev, const ImageSequence &x_next) {
  require_same_shape(x_prev, x_next, "relative_change");
  const double diff = (x_next.flat() - x_prev.flat()).norm();
  const double base = x_prev.norm();
  if (base == 0.0)
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / base;
}

bool stopping_criterion(const ImageSequence &x_prev, const ImageSequence &x_next, double tol) {
  const double base = x_prev.norm();
  if (base == 0.0)
    return x_next.norm() == 0.0;
  return relative_change(x_prev, x_next) < tol;
}

namespace {

MeasurementSet residual(const ImageSequence &x, const BlockDiagonalOperator &op,
                        const MeasurementSet &m) {
  if (static_cast<Index>(m.size()) != op.frames())
    throw ShapeError("solver: measurement count does not match the operator");
  MeasurementSet r = op.apply(x);
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (r[t].size() != m[t].size())
      throw ShapeError("solver: measurement size does not match the operator");
    r[t] -= m[t];
  }
  return r;
}

void check_shapes(const ImageSequence &x, const BlockDiagonalOperator &op) {
  if (x.frames() != op.frames() || x.rows() != op.frame_rows() || x.cols() != op.frame_cols())
    throw ShapeError("solver: iterate shape does not match the operator");
}

// a <- a - gamma * g
void gradient_step(ImageSequence &a, const ImageSequence &g, double gamma) {
  a.flat() -= gamma * g.flat();
}

double resolve_gamma(const SolverConfig &config, double op_norm) {
  const double limit = gamma_limit(config.method, op_norm);
  double gamma = 0.0;
  if (config.gamma) {
    gamma = *config.gamma;
  } else {
    if (op_norm == 0.0)
      throw ParameterError("solver: operator norm is zero; set gamma explicitly");
    gamma = default_gamma(config.method, op_norm);
  }
  if (gamma >= limit && !config.allow_unsafe_gamma)
    throw ParameterError("solver: gamma " + std::to_string(gamma) +
                         " exceeds the safe bound " + std::to_string(limit));
  return gamma;
}

void check_divergence(double objective, double initial, double factor, int iteration) {
  if (!std::isfinite(objective) || (initial > 0.0 && objective > factor * initial))
    throw DivergenceError("solver diverged at iteration " + std::to_string(iteration) +
                          ": objective " + std::to_string(objective) + " vs initial " +
                          std::to_string(initial));
}

} // namespace

double data_term(const ImageSequence &x, const BlockDiagonalOperator &op, const MeasurementSet &m) {
  check_shapes(x, op);
  return tomo::squared_norm(residual(x, op, m));
}

double objective_value(const ImageSequence &x, const BlockDiagonalOperator &op,
                       const MeasurementSet &m, const SolverConfig &config) {
  const double fit = data_term(x, op, m);
  if (config.lambda == 0.0)
    return fit;
  const auto reg = make_regularizer(config, x.rows(), x.cols());
  return fit + config.lambda * reg->value(x);
}

double objective_value(const ImageSequence &low_rank, const ImageSequence &sparse,
                       const BlockDiagonalOperator &op, const MeasurementSet &m,
                       const SolverConfig &config) {
  require_same_shape(low_rank, sparse, "objective_value");
  ImageSequence sum = low_rank;
  sum.flat() += sparse.flat();
  double value = data_term(sum, op, m);
  if (config.lambda_l > 0.0)
    value += config.lambda_l * GlobalLowRank().value(low_rank);
  if (config.lambda_s > 0.0)
    value += config.lambda_s *
             WaveletSparsity(WaveletFilter::from_name(config.wavelet), config.levels).value(sparse);
  return value;
}

double default_gamma(Method method, double op_norm) {
  const double lf = 2.0 * op_norm * op_norm;
  return method == Method::LS ? 1.0 / (2.0 * lf) : 1.8 / lf;
}

double gamma_limit(Method method, double op_norm) {
  const double lf = 2.0 * op_norm * op_norm * (method == Method::LS ? 2.0 : 1.0);
  if (lf == 0.0)
    return std::numeric_limits<double>::infinity();
  return 2.0 / (lf * 1.01);
}

SolveResult pdfp_solve(const BlockDiagonalOperator &op, const MeasurementSet &m,
                       const SolverConfig &config, const ImageSequence &x0) {
  config.validate();
  if (config.method == Method::LS)
    throw ParameterError("pdfp_solve: use ls_solve for the L+S model");
  const Index T = op.frames();
  const Index rows = op.frame_rows();
  const Index cols = op.frame_cols();
  const auto reg = make_regularizer(config, rows, cols);

  SolveResult out;
  out.op_norm = tomo::estimate_op_norm(op, tomo::kPowerIterations, config.seed);
  out.gamma = resolve_gamma(config, out.op_norm);
  const double gamma = out.gamma;
  const double tau = gamma * config.lambda;

  ImageSequence x = x0.empty() ? ImageSequence(T, rows, cols) : x0;
  check_shapes(x, op);
  ImageSequence w(T, rows, cols); // image-domain dual B* v

  MeasurementSet r = residual(x, op, m);
  double reg_value = config.lambda > 0.0 ? reg->value(x) : 0.0;
  out.initial_objective = tomo::squared_norm(r) + config.lambda * reg_value;

  for (int k = 1; k <= config.max_iterations; ++k) {
    ImageSequence z = x;
    ImageSequence g = op.adjoint(r);
    gradient_step(z, g, 2.0 * gamma);

    ImageSequence y = z;
    y.flat() -= w.flat();
    y.clamp_nonnegative();

    ImageSequence u = y;
    u.flat() += w.flat();
    const ImageSequence p = tau > 0.0 ? reg->prox(u, tau) : u;
    w.flat() = u.flat() - p.flat();

    ImageSequence next = std::move(z);
    next.flat() -= w.flat();
    next.clamp_nonnegative();

    IterationRecord rec;
    rec.iteration = k;
    rec.relative_change = relative_change(x, next);
    const bool done = stopping_criterion(x, next, config.tolerance);
    x = std::move(next);

    r = residual(x, op, m);
    rec.data_term = tomo::squared_norm(r);
    rec.regularizer = config.lambda > 0.0 ? config.lambda * reg->value(x) : 0.0;
    rec.objective = rec.data_term + rec.regularizer;
    out.trace.push_back(rec);
    out.iterations = k;
    check_divergence(rec.objective, out.initial_objective, config.divergence_factor, k);
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  return out;
}

SolveResult ls_solve(const BlockDiagonalOperator &op, const MeasurementSet &m,
                     const SolverConfig &config) {
  config.validate();
  if (config.method != Method::LS)
    throw ParameterError("ls_solve: configuration is not an L+S model");
  const Index T = op.frames();
  const Index rows = op.frame_rows();
  const Index cols = op.frame_cols();
  const GlobalLowRank low_rank_reg;
  const WaveletSparsity sparse_reg(WaveletFilter::from_name(config.wavelet), config.levels);

  SolveResult out;
  out.op_norm = tomo::estimate_op_norm(op, tomo::kPowerIterations, config.seed);
  out.gamma = resolve_gamma(config, out.op_norm);
  const double gamma = out.gamma;

  ImageSequence L(T, rows, cols);
  ImageSequence S(T, rows, cols);
  ImageSequence x(T, rows, cols);
  MeasurementSet r = residual(x, op, m);
  out.initial_objective = tomo::squared_norm(r);

  auto penalty = [&](const ImageSequence &l, const ImageSequence &s) {
    double v = 0.0;
    if (config.lambda_l > 0.0)
      v += config.lambda_l * low_rank_reg.value(l);
    if (config.lambda_s > 0.0)
      v += config.lambda_s * sparse_reg.value(s);
    return v;
  };

  for (int k = 1; k <= config.max_iterations; ++k) {
    const ImageSequence g = op.adjoint(r);
    ImageSequence l_next = L;
    ImageSequence s_next = S;
    gradient_step(l_next, g, 2.0 * gamma);
    gradient_step(s_next, g, 2.0 * gamma);
    if (config.lambda_l > 0.0)
      l_next = low_rank_reg.prox(l_next, gamma * config.lambda_l);
    if (config.lambda_s > 0.0)
      s_next = sparse_reg.prox(s_next, gamma * config.lambda_s);

    // Non-negativity of the sum: remove any negative part of L + S.
    auto ld = l_next.data();
    auto sd = s_next.data();
    for (std::size_t i = 0; i < ld.size(); ++i) {
      const double sum = ld[i] + sd[i];
      if (sum >= 0.0)
        continue;
      switch (config.split) {
      case SplitRule::Proportional: {
        const double al = std::abs(ld[i]);
        const double as = std::abs(sd[i]);
        const double share = al / (al + as);
        ld[i] -= sum * share;
        sd[i] -= sum * (1.0 - share);
        break;
      }
      case SplitRule::LowRank:
        ld[i] -= sum;
        break;
      case SplitRule::Sparse:
        sd[i] -= sum;
        break;
      }
    }

    // Convergence on the stacked pair (L, S).
    const double diff2 = (l_next.flat() - L.flat()).squaredNorm() + (s_next.flat() - S.flat()).squaredNorm();
    const double base2 = L.flat().squaredNorm() + S.flat().squaredNorm();
    IterationRecord rec;
    rec.iteration = k;
    rec.relative_change = base2 > 0.0 ? std::sqrt(diff2 / base2)
                                      : (diff2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    const bool done = base2 > 0.0 ? rec.relative_change < config.tolerance : diff2 == 0.0;
    L = std::move(l_next);
    S = std::move(s_next);
    x.flat() = L.flat() + S.flat();

    r = residual(x, op, m);
    rec.data_term = tomo::squared_norm(r);
    rec.regularizer = penalty(L, S);
    rec.objective = rec.data_term + rec.regularizer;
    out.trace.push_back(rec);
    out.iterations = k;
    check_divergence(rec.objective, out.initial_objective, config.divergence_factor, k);
    if (done) {
      out.converged = true;
      break;
    }
  }
  // Rounding in the split can leave values of order -1e-17.
  x.clamp_nonnegative();
  out.x = std::move(x);
  out.low_rank = std::move(L);
  out.sparse = std::move(S);
  return out;
}

SolveResult solve(const BlockDiagonalOperator &op, const MeasurementSet &m,
                  const SolverConfig &config) {
  return config.method == Method::LS ? ls_solve(op, m, config) : pdfp_solve(op, m, config);
}

void write_trace_csv(const std::filesystem::path &path, std::span<const IterationRecord> trace) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << "iteration,objective,data_term,regularizer,relative_change\n";
  out << std::setprecision(17);
  for (const auto &r : trace)
    out << r.iteration << ',' << r.objective << ',' << r.data_term << ',' << r.regularizer << ','
        << r.relative_change << '\n';
  if (!out)
    throw IoError("failed writing " + path.string());
}

} // namespace mrlr::solve
