#include <gtest/gtest.h>

#include "qelm/harness/optimizer.hpp"
#include "qelm/io.hpp"
#include "qelm/reservoir.hpp"
#include "qelm/shadow.hpp"
#include "qelm/waveplates.hpp"
#include "test_util.hpp"

using namespace qelm;

namespace {

const std::filesystem::path kConfigs = QELM_CONFIG_DIR;

// Identity coin and untuned q-plates: the walk does nothing.
WalkConfig idle_walk() { return {{0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0}}; }

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Coin, Examples) {
  EXPECT_LT(max_abs(coin_operator({0.0, 0.0, 0.0}) - ComplexMatrix::Identity(2, 2)), 1e-15);
  ComplexMatrix expected(2, 2);
  expected << 0.0, -1.0, 1.0, 0.0;
  EXPECT_LT(max_abs(coin_operator({0.0, kPi / 4.0, 0.0}) - expected), 1e-15);
}

TEST(Coin, UnitaryForRandomAngles) {
  Rng rng(2);
  for (int k = 0; k < 50; ++k) {
    EXPECT_TRUE(is_unitary(coin_operator({kPi * uniform01(rng), kPi * uniform01(rng), kPi * uniform01(rng)})));
  }
}

TEST(Shift, ZeroTuningIsIdentity) {
  const ComplexMatrix s = shift_operator({0.7, 0.0}, 3);
  EXPECT_EQ(s.rows(), 14);
  EXPECT_LT(max_abs(s - ComplexMatrix::Identity(14, 14)), 1e-15);
}

TEST(Shift, FullTuningMovesLToRWithOamIncrease) {
  const int n = 2;
  const ComplexMatrix s = shift_operator({0.0, kPi}, n);
  EXPECT_TRUE(is_unitary(s));
  // |L, 0> -> i |R, +1> at alpha = 0.
  const Index l0 = 0 * (2 * n + 1) + n;
  const Index r1 = 1 * (2 * n + 1) + n + 1;
  EXPECT_NEAR(std::abs(s(r1, l0)), 1.0, 1e-15);
  EXPECT_THROW(shift_operator({0.0, kPi}, 0), ContractViolation);
}

TEST(Walk, IdleWalkIsIdentity) {
  const ComplexMatrix u = single_walk_unitary(idle_walk(), 4);
  EXPECT_LT(max_abs(u - ComplexMatrix::Identity(u.rows(), u.cols())), 1e-15);
}

TEST(Walk, UnitaryForConfiguredWalks) {
  const ReservoirConfig r1 = load_reservoir(kConfigs / "r1.json");
  EXPECT_TRUE(is_unitary(single_walk_unitary(r1.walk_a, 4), 1e-12));
  EXPECT_TRUE(is_unitary(single_walk_unitary(r1.walk_b, 6), 1e-12));
}

TEST(Povm, ZeroContractionGivesZeroEffects) {
  const EffectivePovm povm = effective_povm_from_contraction(ComplexMatrix::Zero(kOutcomes, kInputDim));
  EXPECT_EQ(povm.size(), kOutcomes);
  for (const auto& e : povm.effects()) EXPECT_EQ(max_abs(e), 0.0);
}

TEST(Povm, IdleWalkProjectsOnHH) {
  ReservoirConfig cfg;
  cfg.walk_a = idle_walk();
  cfg.walk_b = idle_walk();
  const EffectivePovm povm = effective_povm(cfg);
  ComplexMatrix hh = ComplexMatrix::Zero(4, 4);
  hh(0, 0) = 1.0;
  for (Index b = 0; b < povm.size(); ++b) {
    const ComplexMatrix expected = b == outcome_index(0, 0) ? hh : ComplexMatrix::Zero(4, 4);
    EXPECT_LT(max_abs(povm.effect(b) - expected), 1e-15) << "outcome " << b;
  }
}

TEST(Povm, RejectsInvalidEffects) {
  ComplexMatrix neg = ComplexMatrix::Zero(4, 4);
  neg(0, 0) = -0.1;
  EXPECT_THROW(EffectivePovm({neg}), PovmError);
  EXPECT_THROW(EffectivePovm({ComplexMatrix::Identity(4, 4), ComplexMatrix::Identity(4, 4)}), PovmError);
  EXPECT_THROW(EffectivePovm(std::vector<ComplexMatrix>{}), PovmError);
}

TEST(Povm, ConfiguredReservoirsAreSubNormalized) {
  for (const char* f : {"r1.json", "r2.json", "r3.json"}) {
    const EffectivePovm povm = effective_povm(load_reservoir(kConfigs / f));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(povm.total());
    EXPECT_LE(eig.eigenvalues().maxCoeff(), 1.0 + 1e-12) << f;
    for (const auto& e : povm.effects()) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> ee(e);
      EXPECT_GE(ee.eigenvalues().minCoeff(), -1e-12) << f;
    }
  }
}

TEST(Povm, OutcomeLabelsFollowIndexConvention) {
  const auto labels = two_photon_outcome_labels();
  ASSERT_EQ(static_cast<Index>(labels.size()), kOutcomes);
  for (Index b = 0; b < kOutcomes; ++b) EXPECT_EQ(outcome_index(labels[b].n1, labels[b].n2), b);
  EXPECT_EQ(outcome_index(-2, -2), 0);
  EXPECT_EQ(outcome_index(2, 2), 24);
}

// Truncating the internal OAM ladder more widely must not change anything:
// two steps move at most two units.
TEST(Povm, IndependentOfInternalTruncation) {
  ReservoirConfig cfg = load_reservoir(kConfigs / "r1.json");
  const ComplexMatrix k4 = channel_contraction(cfg);
  cfg.oam_internal_halfwidth = 7;
  EXPECT_LT(max_abs(channel_contraction(cfg) - k4), 1e-14);
}

TEST(Povm, ProjectionGlobalPhaseIsIrrelevant) {
  ReservoirConfig cfg = load_reservoir(kConfigs / "r1.json");
  const double before = harness::reservoir_objective(cfg);
  cfg.projection_a = Ket(cfg.projection_a.amplitudes() * std::exp(kI * 0.9));
  cfg.projection_b = Ket(cfg.projection_b.amplitudes() * std::exp(kI * -2.3));
  EXPECT_NEAR(harness::reservoir_objective(cfg), before, 1e-9 * before);
}

TEST(Povm, OptimizedReservoirIsInformationallyComplete) {
  const FrameSuperoperator f = frame_superoperator(effective_povm(load_reservoir(kConfigs / "r1.json")));
  EXPECT_EQ(frame_rank(f), 16);
}

TEST(Configs, R2IsR1WithSwappedCoinQwpAngles) {
  const ReservoirConfig r1 = load_reservoir(kConfigs / "r1.json");
  const ReservoirConfig r2 = load_reservoir(kConfigs / "r2.json");
  EXPECT_LT(max_abs(channel_contraction(swap_coin_qwp_angles(r1)) - channel_contraction(r2)), 1e-9);
  EXPECT_DOUBLE_EQ(r2.walk_a.coin.zeta, r1.walk_a.coin.phi);
  EXPECT_DOUBLE_EQ(r2.walk_b.coin.phi, r1.walk_b.coin.zeta);
}

TEST(Configs, R3IsSeededRandomReservoir) {
  const ReservoirConfig r3 = load_reservoir(kConfigs / "r3.json");
  const ReservoirConfig fresh = harness::random_reservoir(3);
  const EffectivePovm a = effective_povm(r3);
  const EffectivePovm b = effective_povm(fresh);
  for (Index k = 0; k < a.size(); ++k) EXPECT_LT(max_abs(a.effect(k) - b.effect(k)), 1e-9);
}

TEST(Waveplates, Examples) {
  const ComplexVector h = ComplexVector::Unit(2, 0);
  const ComplexVector v = ComplexVector::Unit(2, 1);
  EXPECT_NEAR(std::abs(v.dot(hwp(kPi / 4.0) * h)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(h.dot(qwp(0.0) * h)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(h.dot(prep_unitary(0.0, 0.0) * h)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(v.dot(prep_unitary(0.0, kPi / 4.0) * h)), 1.0, 1e-15);
  EXPECT_TRUE(is_unitary(qwp(0.3)));
  EXPECT_TRUE(is_unitary(hwp(1.1)));
}

TEST(Waveplates, CircularBasis) {
  const ComplexMatrix& c = circular_to_hv();
  EXPECT_TRUE(is_unitary(c));
  EXPECT_NEAR(std::abs(c(1, 0) - kI / std::sqrt(2.0)), 0.0, 1e-15);   // L has +i on V
  EXPECT_NEAR(std::abs(c(1, 1) + kI / std::sqrt(2.0)), 0.0, 1e-15);   // R has -i on V
}

TEST(Waveplates, ProjectionSettingsMapEtaToH) {
  const ComplexVector h = ComplexVector::Unit(2, 0);
  const ProjectionWaveplates ph = projection_waveplates(Ket(h));
  EXPECT_NEAR(std::abs(h.dot(qwp(ph.theta_proj) * hwp(ph.phi_proj) * h)), 1.0, 1e-10);
  const ProjectionWaveplates pv = projection_waveplates(Ket(ComplexVector::Unit(2, 1)));
  EXPECT_NEAR(std::abs(h.dot(qwp(pv.theta_proj) * hwp(pv.phi_proj) * ComplexVector::Unit(2, 1))), 1.0, 1e-10);
  Rng rng(8);
  for (int k = 0; k < 100; ++k) {
    const ComplexVector eta = test::random_ket(rng, 2);
    const ProjectionWaveplates p = projection_waveplates(Ket(eta));
    EXPECT_NEAR(std::abs(h.dot(qwp(p.theta_proj) * hwp(p.phi_proj) * eta)), 1.0, 1e-10);
  }
}

TEST(Waveplates, PolarizationKetRoundTrip) {
  Rng rng(4);
  for (int k = 0; k < 50; ++k) {
    const Ket eta(test::random_ket(rng, 2));
    const auto [t, p] = polarization_angles(eta);
    EXPECT_NEAR(std::abs(polarization_ket(t, p).amplitudes().dot(eta.amplitudes())), 1.0, 1e-12);
  }
}
