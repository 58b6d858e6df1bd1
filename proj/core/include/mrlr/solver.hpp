#pragma once

#include "mrlr/casorati.hpp"
#include "mrlr/operator.hpp"
#include "mrlr/regularizers.hpp"
#include "mrlr/sequence.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mrlr::solve {

using tomo::BlockDiagonalOperator;
using tomo::MeasurementSet;

enum class Method { GLR, LLR, MRLR, LS };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

/// How the non-negativity correction of L + S is shared between L and S.
enum class SplitRule { Proportional, LowRank, Sparse };

std::string_view to_string(SplitRule r);
SplitRule split_rule_from_string(std::string_view s);

struct SolverConfig {
  Method method = Method::MRLR;
  double lambda = 1.0;
  double lambda_l = 0.2;
  double lambda_s = 0.08;

  // Regularizer parameters. patch_sizes holds one entry for LLR and one per
  // scale j = 0..levels (coarse to fine) for MRLR; a single entry is reused
  // at every scale.
  std::string wavelet = "db3";
  int levels = 2;
  std::vector<PatchSize> patch_sizes{{32, 32}};

  std::optional<double> gamma;
  bool allow_unsafe_gamma = false;
  int max_iterations = 2000;
  double tolerance = 5e-4;
  std::uint64_t seed = tomo::kPowerSeed;
  double divergence_factor = 1e3;
  SplitRule split = SplitRule::Proportional;

  void validate() const;
};

/// Regularizer of a GLR, LLR or MRLR configuration for rows x cols frames.
std::unique_ptr<Regularizer> make_regularizer(const SolverConfig &config, Index rows, Index cols);

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double data_term = 0.0;
  double regularizer = 0.0;
  double relative_change = 0.0;
};

struct SolveResult {
  ImageSequence x;
  ImageSequence low_rank; // L+S only
  ImageSequence sparse;   // L+S only
  std::vector<IterationRecord> trace;
  double initial_objective = 0.0;
  double gamma = 0.0;
  double op_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// ||x_next - x_prev|| / ||x_prev|| < tol; a zero previous iterate counts as
/// converged only when the next one is zero as well.
bool stopping_criterion(const ImageSequence &x_prev, const ImageSequence &x_next, double tol);
double relative_change(const ImageSequence &x_prev, const ImageSequence &x_next);

/// sum_t ||A_t x_t - m_t||^2.
double data_term(const ImageSequence &x, const BlockDiagonalOperator &op, const MeasurementSet &m);

/// ||A x - m||^2 + lambda R(x) for GLR, LLR and MRLR configurations.
double objective_value(const ImageSequence &x, const BlockDiagonalOperator &op,
                       const MeasurementSet &m, const SolverConfig &config);
/// ||A (L + S) - m||^2 + lambda_L ||M L||_* + lambda_S ||W S||_1.
double objective_value(const ImageSequence &low_rank, const ImageSequence &sparse,
                       const BlockDiagonalOperator &op, const MeasurementSet &m,
                       const SolverConfig &config);

/// Step size used when none is configured: 1.8 / (2 ||A||^2) for PDFP and
/// 1 / (4 ||A||^2) for L+S, whose gradient acts on both components.
double default_gamma(Method method, double op_norm);
/// Step sizes at or above this bound are refused unless overridden.
double gamma_limit(Method method, double op_norm);

/// PDFP with non-negativity for GLR, LLR and MRLR. Starts from x0 (zero
/// when empty) with a zero dual variable.
SolveResult pdfp_solve(const BlockDiagonalOperator &op, const MeasurementSet &m,
                       const SolverConfig &config, const ImageSequence &x0 = {});

/// Proximal gradient on (L, S) with non-negativity of L + S.
SolveResult ls_solve(const BlockDiagonalOperator &op, const MeasurementSet &m,
                     const SolverConfig &config);

/// Dispatches on config.method.
SolveResult solve(const BlockDiagonalOperator &op, const MeasurementSet &m,
                  const SolverConfig &config);

/// CSV with header "iteration,objective,data_term,regularizer,relative_change".
void write_trace_csv(const std::filesystem::path &path, std::span<const IterationRecord> trace);

} // namespace mrlr::solve
