#include <gtest/gtest.h>

#include "qelm/io.hpp"
#include "qelm/observables.hpp"
#include "qelm/readout.hpp"
#include "qelm/shadow.hpp"
#include "qelm/state_prep.hpp"
#include "test_util.hpp"

using namespace qelm;

namespace {

const std::filesystem::path kConfigs = QELM_CONFIG_DIR;

EffectivePovm r1_povm() { return effective_povm(load_reservoir(kConfigs / "r1.json")); }

// Two-outcome computational-basis measurement on one qubit.
EffectivePovm z_basis() {
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  return EffectivePovm({p0, p1});
}

}  // namespace

TEST(Frame, TrivialEffect) {
  const FrameSuperoperator f = frame_superoperator(EffectivePovm({ComplexMatrix::Identity(4, 4)}));
  Rng rng(1);
  const ComplexMatrix x = test::random_density(rng) * 3.0;
  EXPECT_LT((f.apply(x) - x.trace() * ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(frame_rank(f), 1);
}

TEST(Frame, ProjectorPovmIsDiagonal) {
  const FrameSuperoperator f = frame_superoperator(z_basis());
  ComplexMatrix off = f.matrix;
  off.diagonal().setZero();
  EXPECT_EQ(off.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(frame_rank(f), 2);
}

TEST(Frame, HermitianPsdAndInformationallyComplete) {
  const FrameSuperoperator f = frame_superoperator(r1_povm());
  EXPECT_TRUE(is_hermitian(f.matrix, 1e-10));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(f.matrix);
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
  EXPECT_EQ(frame_rank(f), 16);
  EXPECT_GT(inverse_frame_trace(f), 0.0);
}

TEST(DualFrame, ProjectorToyReconstructsDiagonal) {
  const EffectivePovm povm = z_basis();
  const DualFrame duals = dual_frame(frame_superoperator(povm), povm);
  EXPECT_TRUE(duals.pseudo_inverted);
  ComplexMatrix rho(2, 2);
  rho << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
  ComplexMatrix back = ComplexMatrix::Zero(2, 2);
  for (Index b = 0; b < 2; ++b) back += (duals.duals[b] * rho).trace() * povm.effect(b);
  EXPECT_NEAR(std::abs(back(0, 0) - 0.7), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(back(1, 1) - 0.3), 0.0, 1e-14);
  EXPECT_EQ(back(0, 1), Complex(0.0, 0.0));
}

TEST(DualFrame, ReconstructionIdentityForInformationallyComplete) {
  const EffectivePovm povm = r1_povm();
  const DualFrame duals = dual_frame(frame_superoperator(povm), povm);
  EXPECT_FALSE(duals.pseudo_inverted);
  for (const auto& d : duals.duals) EXPECT_TRUE(is_hermitian(d, 1e-10));
  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    const ComplexMatrix rho = test::random_density(rng);
    ComplexMatrix back = ComplexMatrix::Zero(4, 4);
    for (Index b = 0; b < povm.size(); ++b) back += (povm.effect(b) * rho).trace() * duals.duals[b];
    ASSERT_LT((back - rho).cwiseAbs().maxCoeff(), 1e-9);
  }
}

// A rank-deficient effective POVM reconstructs exactly the projection of rho
// onto the operator span of its effects.
TEST(DualFrame, RankDeficientReconstructsOnSpan) {
  ReservoirConfig cfg;  // zero coins: not informationally complete
  const EffectivePovm povm = effective_povm(cfg);
  const FrameSuperoperator f = frame_superoperator(povm);
  ASSERT_LT(frame_rank(f), 16);
  const DualFrame duals = dual_frame(f, povm);
  EXPECT_TRUE(duals.pseudo_inverted);
  const ComplexMatrix v = povm.vectorized();
  const ComplexMatrix proj = v * pseudoinverse(v, 1e-10);
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const ComplexMatrix rho = test::random_density(rng);
    ComplexMatrix back = ComplexMatrix::Zero(4, 4);
    for (Index b = 0; b < povm.size(); ++b) back += (povm.effect(b) * rho).trace() * duals.duals[b];
    EXPECT_LT((vectorize(back) - proj * vectorize(rho)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Estimator, ZeroObservableAndUnbiasedness) {
  const EffectivePovm povm = r1_povm();
  const DualFrame duals = dual_frame(frame_superoperator(povm), povm);
  EXPECT_EQ(shadow_estimator(ComplexMatrix::Zero(4, 4), duals).cwiseAbs().maxCoeff(), 0.0);
  Rng rng(4);
  for (const Observable& o : default_targets()) {
    const RealVector est = shadow_estimator(o.matrix, duals);
    for (int k = 0; k < 10; ++k) {
      const ComplexMatrix rho = test::random_density(rng);
      EXPECT_NEAR(est.dot(outcome_probabilities(rho, povm).probs), expectation_value(o.matrix, rho), 1e-9);
    }
  }
}

TEST(Estimator, MatchesExactReadoutRows) {
  const EffectivePovm povm = r1_povm();
  const DualFrame duals = dual_frame(frame_superoperator(povm), povm);
  const Dataset d = generate_dataset(reference_state(ReferenceTag::VH), reference_state(ReferenceTag::PsiPlus), 100,
                                     100, PrepMode::IndependentAngles, 5);
  const auto obs = default_targets();
  TrainOptions opts;
  opts.input_form = InputForm::Frequencies;
  std::vector<std::string> n;
  for (const auto& o : obs) n.push_back(o.name);
  const TrainResult r = train(probability_matrix(d.density_matrices(), povm).probs,
                              expectation_matrix(obs, d.density_matrices()), n, opts);
  // The readout is unique only up to the null space of the training data;
  // on probability vectors both must agree.
  Rng rng(6);
  std::vector<ComplexMatrix> test;
  for (int k = 0; k < 100; ++k) test.push_back(test::random_density(rng));
  const RealMatrix p = probability_matrix(test, povm).probs;
  for (std::size_t j = 0; j < obs.size(); ++j) {
    const RealVector est = shadow_estimator(obs[j].matrix, duals);
    const RealVector diff = r.readout.weights.row(static_cast<Index>(j)) * p - est.transpose() * p;
    EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-8) << obs[j].name;
  }
}

TEST(ShadowMse, LimitsAndScaling) {
  const EffectivePovm povm = r1_povm();
  const DualFrame duals = dual_frame(frame_superoperator(povm), povm);
  Rng rng(7);
  std::vector<ComplexMatrix> states;
  for (int k = 0; k < 50; ++k) states.push_back(test::random_density(rng));
  const Observable w = observable_by_name("W_Phi+");
  const RealVector truths = expectation_matrix({w}, states).row(0).transpose();
  const ProbabilityMatrix exact = probability_matrix(states, povm);

  const CountsMatrix c4 = sample_matrix(exact, 10000, 1);
  const CountsMatrix c6 = sample_matrix(exact, 1000000, 1);
  const double saturation = truths.squaredNorm() / 50.0;
  EXPECT_NEAR(shadow_mse(c4, truths, w, duals, 1e12), saturation, 1e-6 * saturation);
  const double m4 = shadow_mse(c4, truths, w, duals, 1e4);
  const double m6 = shadow_mse(c6, truths, w, duals, 1e6);
  EXPECT_LT(m6, m4);
  EXPECT_NEAR(std::log10(m4 / m6), 2.0, 0.3);
  EXPECT_THROW(shadow_mse(c4, truths, w, duals, 0.0), ContractViolation);
}

TEST(MinMse, GridScan) {
  const EffectivePovm povm = r1_povm();
  const DualFrame duals = dual_frame(frame_superoperator(povm), povm);
  Rng rng(8);
  std::vector<ComplexMatrix> states;
  for (int k = 0; k < 50; ++k) states.push_back(test::random_density(rng));
  const Observable o = observable_by_name("ZZ");
  const RealVector est = shadow_estimator(o.matrix, duals);
  const RealVector truths = expectation_matrix({o}, states).row(0).transpose();
  const CountsMatrix c = sample_matrix(probability_matrix(states, povm), 100000, 2);

  const MinMse single = min_mse_over_n(c, truths, est, {5000.0});
  EXPECT_DOUBLE_EQ(single.n_star, 5000.0);
  EXPECT_DOUBLE_EQ(single.mse_min, shadow_mse(c, truths, est, 5000.0));

  const auto grid = default_n_grid();
  ASSERT_EQ(grid.size(), 60u);
  EXPECT_NEAR(grid.front(), 1e2, 1e-9);
  EXPECT_NEAR(grid.back(), 1e8, 1e-3);
  const MinMse m = min_mse_over_n(c, truths, est, grid);
  EXPECT_EQ(m.curve.size(), 60);
  EXPECT_DOUBLE_EQ(m.mse_min, m.curve.minCoeff());
  const double step = std::pow(10.0, 6.0 / 59.0);
  EXPECT_LE(std::abs(std::log(m.n_star / 1e5)), std::log(step) + 1e-9);
  EXPECT_THROW(min_mse_over_n(c, truths, est, {}), ContractViolation);
  EXPECT_THROW(log_grid(0.0, 1.0, 3), ContractViolation);
}
