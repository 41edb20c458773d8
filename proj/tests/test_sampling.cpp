#include <gtest/gtest.h>

#include "qelm/io.hpp"
#include "qelm/sampling.hpp"
#include "qelm/state_prep.hpp"
#include "test_util.hpp"

using namespace qelm;

namespace {

const std::filesystem::path kConfigs = QELM_CONFIG_DIR;

EffectivePovm hh_povm() {
  std::vector<ComplexMatrix> effects(kOutcomes, ComplexMatrix::Zero(4, 4));
  effects[static_cast<std::size_t>(outcome_index(0, 0))](0, 0) = 1.0;
  return EffectivePovm(effects);
}

ProbabilityVector r1_probs(std::uint64_t seed) {
  Rng rng(seed);
  return outcome_probabilities(test::random_density(rng), effective_povm(load_reservoir(kConfigs / "r1.json")));
}

}  // namespace

TEST(Probabilities, ZeroPovmLosesEverything) {
  const EffectivePovm zero(std::vector<ComplexMatrix>(kOutcomes, ComplexMatrix::Zero(4, 4)));
  const ProbabilityVector p = outcome_probabilities(ComplexMatrix::Identity(4, 4) / 4.0, zero);
  EXPECT_DOUBLE_EQ(p.loss, 1.0);
  EXPECT_EQ(p.probs.sum(), 0.0);
}

TEST(Probabilities, ToyPovmOnHH) {
  ComplexMatrix hh = ComplexMatrix::Zero(4, 4);
  hh(0, 0) = 1.0;
  const ProbabilityVector p = outcome_probabilities(hh, hh_povm());
  EXPECT_DOUBLE_EQ(p.probs(outcome_index(0, 0)), 1.0);
  EXPECT_DOUBLE_EQ(p.loss, 0.0);
}

TEST(Probabilities, ExtraTransmissionScalesAndValidates) {
  Rng rng(1);
  const ComplexMatrix rho = test::random_density(rng);
  const EffectivePovm povm = effective_povm(load_reservoir(kConfigs / "r1.json"));
  const ProbabilityVector full = outcome_probabilities(rho, povm);
  const ProbabilityVector half = outcome_probabilities(rho, povm, 0.5);
  EXPECT_LT((half.probs - 0.5 * full.probs).cwiseAbs().maxCoeff(), 1e-16);
  EXPECT_NEAR(half.loss, 1.0 - 0.5 * full.probs.sum(), 1e-15);
  EXPECT_THROW(outcome_probabilities(rho, povm, 0.0), ContractViolation);
  EXPECT_THROW(outcome_probabilities(rho, povm, 1.5), ContractViolation);
  EXPECT_THROW(outcome_probabilities(ComplexMatrix::Identity(2, 2) / 2.0, povm), ContractViolation);
}

TEST(Counts, ZeroShots) {
  const CountsVector c = sample_counts(r1_probs(1), 0, 3);
  EXPECT_EQ(c.counts.sum(), 0);
  EXPECT_EQ(c.shots, 0);
  EXPECT_THROW(sample_counts(r1_probs(1), -1, 3), ContractViolation);
}

TEST(Counts, ConcentratedDistribution) {
  ProbabilityVector p;
  p.probs = RealVector::Zero(kOutcomes);
  p.probs(7) = 0.6;
  p.loss = 0.4;
  const CountsVector c = sample_counts(p, 100, 11);
  EXPECT_EQ(c.counts.sum(), c.counts(7));
  EXPECT_LE(c.counts(7), 100);
  p.probs(7) = 1.0;
  p.loss = 0.0;
  EXPECT_EQ(sample_counts(p, 100, 11).counts(7), 100);
}

TEST(Counts, DeterministicPerSeed) {
  const ProbabilityVector p = r1_probs(2);
  EXPECT_EQ(sample_counts(p, 5000, 9).counts, sample_counts(p, 5000, 9).counts);
  EXPECT_NE(sample_counts(p, 5000, 9).counts, sample_counts(p, 5000, 10).counts);
  EXPECT_EQ(sample_counts(p, 5000, 9, SamplingMode::Poisson).counts,
            sample_counts(p, 5000, 9, SamplingMode::Poisson).counts);
}

// Frequencies concentrate: |f - p| stays within 6 standard deviations.
TEST(Counts, FrequenciesConcentrate) {
  const ProbabilityVector p = r1_probs(3);
  const std::int64_t n = 2'000'000;
  for (SamplingMode mode : {SamplingMode::Multinomial, SamplingMode::Poisson}) {
    const CountsVector c = sample_counts(p, n, 17, mode);
    for (Index b = 0; b < kOutcomes; ++b) {
      const double f = static_cast<double>(c.counts(b)) / static_cast<double>(n);
      const double sd = std::sqrt(std::max(p.probs(b), 1e-12) / static_cast<double>(n));
      EXPECT_LT(std::abs(f - p.probs(b)), 6.0 * sd + 1e-12) << "outcome " << b;
    }
  }
}

TEST(Normalize, Examples) {
  CountsVector c{CountVector::Zero(kOutcomes), 10};
  EXPECT_THROW(normalize_counts(c), EmptyStatisticsError);
  c.counts(4) = 3;
  const RealVector one = normalize_counts(c);
  EXPECT_DOUBLE_EQ(one(4), 1.0);
  EXPECT_DOUBLE_EQ(one.sum(), 1.0);
  c.counts.setConstant(2);
  EXPECT_LT((normalize_counts(c).array() - 1.0 / 25.0).abs().maxCoeff(), 1e-16);
}

TEST(Normalize, ApproachesConditionalProbabilities) {
  const ProbabilityVector p = r1_probs(4);
  const RealVector f = normalize_counts(sample_counts(p, 4'000'000, 5));
  EXPECT_LT((f - p.probs / p.probs.sum()).cwiseAbs().maxCoeff(), 2e-3);
}

TEST(Mix, EndpointsAndLinearity) {
  const ProbabilityVector a = r1_probs(5);
  const ProbabilityVector b = r1_probs(6);
  EXPECT_EQ(mix_distributions(a, b, 0.0).probs, a.probs);
  EXPECT_EQ(mix_distributions(a, b, 1.0).probs, b.probs);
  const ProbabilityVector m = mix_distributions(a, b, 0.3);
  EXPECT_LT((m.probs - (0.7 * a.probs + 0.3 * b.probs)).cwiseAbs().maxCoeff(), 1e-16);
  EXPECT_NEAR(m.loss, 0.7 * a.loss + 0.3 * b.loss, 1e-15);
  EXPECT_THROW(mix_distributions(a, b, -0.1), ContractViolation);
  EXPECT_THROW(mix_distributions(a, b, 1.1), ContractViolation);
}

TEST(BuildMatrices, ExactModeOmitsCounts) {
  const Dataset d = generate_dataset(reference_state(ReferenceTag::VH), reference_state(ReferenceTag::PsiPlus), 5,
                                     5, PrepMode::SameAngles, 1);
  const EffectivePovm povm = effective_povm(load_reservoir(kConfigs / "r1.json"));
  const MeasurementData exact = build_matrices(d, povm, std::nullopt, 3);
  EXPECT_FALSE(exact.counts.has_value());
  EXPECT_EQ(exact.exact.probs.rows(), kOutcomes);
  EXPECT_EQ(exact.exact.probs.cols(), 10);
  const MeasurementData a = build_matrices(d, povm, 1000, 3);
  const MeasurementData b = build_matrices(d, povm, 1000, 3);
  ASSERT_TRUE(a.counts.has_value());
  EXPECT_EQ(a.counts->counts, b.counts->counts);
  EXPECT_EQ(a.counts->shots, std::vector<std::int64_t>(10, 1000));
}
