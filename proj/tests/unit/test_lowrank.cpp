#include "mrlr/casorati.hpp"
#include "mrlr/error.hpp"
#include "mrlr/lowrank.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mrlr;
using mrlr::testing::random_low_rank;
using mrlr::testing::random_matrix;
using mrlr::testing::random_sequence;
using mrlr::testing::Rng;

TEST(ThinSvd, FactorsReconstructAndAreOrthonormal) {
  Rng rng(20);
  for (auto [n, t] : {std::pair<Index, Index>{12, 5}, {5, 12}, {7, 7}}) {
    const Eigen::MatrixXd F = random_matrix(rng, n, t);
    const auto s = thin_svd(F);
    const Index r = std::min(n, t);
    ASSERT_EQ(s.U.cols(), r);
    ASSERT_EQ(s.V.cols(), r);
    EXPECT_LT((s.reconstruct() - F).norm(), 1e-12 * F.norm());
    EXPECT_LT((s.U.transpose() * s.U - Eigen::MatrixXd::Identity(r, r)).norm(), 1e-12);
    EXPECT_LT((s.V.transpose() * s.V - Eigen::MatrixXd::Identity(r, r)).norm(), 1e-12);
    for (Index i = 1; i < r; ++i)
      EXPECT_GE(s.sigma(i - 1), s.sigma(i));
    EXPECT_LT((s.sigma - mrlr::testing::singular_values_by_eig(F)).norm(), 1e-12 * F.norm());
  }
}

TEST(ThinSvd, SignConventionAndFullBases) {
  Rng rng(21);
  const Eigen::MatrixXd F = random_matrix(rng, 6, 3);
  const auto s = thin_svd(F);
  for (Index k = 0; k < s.U.cols(); ++k) {
    Index i = 0;
    while (std::abs(s.U(i, k)) < 1e-12)
      ++i;
    EXPECT_GT(s.U(i, k), 0.0);
  }
  const auto full = thin_svd(F, true);
  EXPECT_EQ(full.U.rows(), 6);
  EXPECT_EQ(full.U.cols(), 6);
  EXPECT_EQ(full.V.cols(), 3);
  EXPECT_LT((full.U.transpose() * full.U - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-12);
}

TEST(ThinSvd, RankDeficientValuesClamped) {
  Rng rng(22);
  const Eigen::MatrixXd F = random_low_rank(rng, 10, 6, 2);
  const auto s = thin_svd(F);
  EXPECT_GT(s.sigma(1), 0.0);
  for (Index i = 2; i < s.rank(); ++i)
    EXPECT_EQ(s.sigma(i), 0.0);
  EXPECT_THROW(thin_svd(Eigen::MatrixXd::Constant(2, 2, NAN)), NumericError);
}

TEST(SoftThreshold, MatchesGridSearchMinimizer) {
  // prox of tau|.| : argmin_z 1/2 (z - x)^2 + tau |z| searched on a fine grid.
  const double tau = 0.7;
  for (double x : {-2.3, -0.7, -0.2, 0.0, 0.5, 0.7001, 1.9}) {
    double best = 0.0, best_val = 1e300;
    for (int k = -40000; k <= 40000; ++k) {
      const double z = k * 1e-4;
      const double v = 0.5 * (z - x) * (z - x) + tau * std::abs(z);
      if (v < best_val) {
        best_val = v;
        best = z;
      }
    }
    Eigen::VectorXd in(1);
    in(0) = x;
    EXPECT_NEAR(soft_threshold(in, tau)(0), best, 1.1e-4) << x;
  }
  Eigen::VectorXd v(2);
  v << 1.0, -1.0;
  EXPECT_THROW(soft_threshold(v, -1.0), ParameterError);
}

TEST(Svt, ShrinksSingularValues) {
  Rng rng(23);
  const Eigen::MatrixXd F = random_matrix(rng, 8, 5);
  const auto s0 = mrlr::testing::singular_values_by_eig(F);
  const double tau = s0(2);
  const auto s1 = mrlr::testing::singular_values_by_eig(svt(F, tau));
  for (Index i = 0; i < s0.size(); ++i)
    EXPECT_NEAR(s1(i), std::max(s0(i) - tau, 0.0), 1e-12);
  EXPECT_EQ(svt(F, 0.0), F);
  EXPECT_LT(svt(F, s0(0) * 1.01).norm(), 1e-14);
}

TEST(Svt, BeatsRandomPerturbations) {
  Rng rng(24);
  std::normal_distribution<double> normal;
  for (int inst = 0; inst < 5; ++inst) {
    const Eigen::MatrixXd F = random_matrix(rng, 9, 4);
    const double tau = 0.5 + inst * 0.3;
    auto obj = [&](const Eigen::MatrixXd &X) {
      return 0.5 * (X - F).squaredNorm() + tau * mrlr::testing::singular_values_by_eig(X).sum();
    };
    const Eigen::MatrixXd P = svt(F, tau);
    const double best = obj(P);
    for (int k = 0; k < 100; ++k) {
      const double scale = std::pow(10.0, -3.0 + 3.0 * (k % 4) / 3.0);
      const Eigen::MatrixXd Q = P + scale * random_matrix(rng, 9, 4);
      EXPECT_LE(best, obj(Q) + 1e-9);
    }
    (void)normal;
  }
}

TEST(NuclearNorm, MatchesOracle) {
  Rng rng(25);
  const Eigen::MatrixXd F = random_matrix(rng, 6, 9);
  EXPECT_NEAR(nuclear_norm(F), mrlr::testing::singular_values_by_eig(F).sum(), 1e-12);
  EXPECT_EQ(nuclear_norm(Eigen::MatrixXd::Zero(3, 3)), 0.0);
}

TEST(Diag, EmbedIsAdjointOfExtract) {
  Rng rng(26);
  const Eigen::MatrixXd M = random_matrix(rng, 5, 3);
  Eigen::VectorXd y(3);
  y << 1.0, -2.0, 0.5;
  const double lhs = diag_extract(M).dot(y);
  const double rhs = (M.array() * diag_embed(y, 5, 3).array()).sum();
  EXPECT_NEAR(lhs, rhs, 1e-14);
  EXPECT_THROW(diag_embed(y, 2, 5), ShapeError);
}

TEST(OperatorL, SpectrumEqualsSingularValues) {
  Rng rng(27);
  const auto f = random_sequence(rng, 4, 3, 3);
  const auto a = op_L(f);
  const auto s = mrlr::testing::singular_values_by_eig(casorati(f));
  EXPECT_LT((a.spectrum.values - s).norm(), 1e-12);
  EXPECT_GE(a.spectrum.values.minCoeff(), 0.0);
}

TEST(OperatorL, UnitaryOnOwnBases) {
  Rng rng(28);
  for (int inst = 0; inst < 20; ++inst) {
    const Index T = 1 + inst % 7, r = 1 + inst % 4, c = 2 + inst % 3;
    const auto f = random_sequence(rng, T, r, c);
    const auto a = op_L(f);
    const auto back = op_L_adjoint(a.spectrum.values, a.bases, r, c);
    EXPECT_LT((back.flat() - f.flat()).norm(), 1e-10 * f.norm());
    Eigen::VectorXd y = random_matrix(rng, a.spectrum.values.size(), 1);
    const auto ly = apply_L(op_L_adjoint(y, a.bases, r, c), a.bases);
    EXPECT_LT((ly - y).norm(), 1e-10 * y.norm());
  }
}

TEST(OperatorL, AdjointPairForFrozenBases) {
  Rng rng(29);
  const auto f = random_sequence(rng, 5, 4, 2);
  const auto a = op_L(f);
  const auto x = random_sequence(rng, 5, 4, 2);
  const Eigen::VectorXd y = random_matrix(rng, a.spectrum.values.size(), 1);
  EXPECT_NEAR(apply_L(x, a.bases).dot(y), dot(x, op_L_adjoint(y, a.bases, 4, 2)), 1e-12);
}

TEST(OperatorL, FrozenBasesProjectOtherSequences) {
  // With the bases of f frozen, L*L is an orthogonal projection that is the
  // identity on f but not on an unrelated x.
  Rng rng(30);
  const auto f = random_sequence(rng, 4, 3, 3);
  const auto a = op_L(f);
  const auto x = random_sequence(rng, 4, 3, 3);
  const auto px = op_L_adjoint(apply_L(x, a.bases), a.bases, 3, 3);
  EXPECT_GT((px.flat() - x.flat()).norm(), 1e-3 * x.norm());
  const auto ppx = op_L_adjoint(apply_L(px, a.bases), a.bases, 3, 3);
  EXPECT_LT((ppx.flat() - px.flat()).norm(), 1e-12 * x.norm());
}

TEST(OperatorL, NuclearNormEqualsSpectrumL1) {
  Rng rng(31);
  for (int inst = 0; inst < 20; ++inst) {
    const auto f = random_sequence(rng, 2 + inst % 5, 2 + inst % 3, 3);
    EXPECT_NEAR(nuclear_norm(casorati(f)), op_L(f).spectrum.values.lpNorm<1>(), 1e-10 * f.norm());
  }
}
