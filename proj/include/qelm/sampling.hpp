// Outcome statistics: exact (sub-normalized) probabilities, finite-shot
// counts with post-selection loss, and convex mixtures of distributions.
#ifndef QELM_SAMPLING_HPP
#define QELM_SAMPLING_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "qelm/linalg.hpp"
#include "qelm/reservoir.hpp"
#include "qelm/state_prep.hpp"

namespace qelm {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

struct ProbabilityVector {
  RealVector probs;  // one entry per observed outcome
  double loss = 0.0; // probability of the event being discarded
};

struct CountsVector {
  CountVector counts;        // observed outcomes only
  std::int64_t shots = 0;    // injected copies, lost ones included
};

/// Column k holds the exact outcome probabilities of state k.
struct ProbabilityMatrix {
  RealMatrix probs;
  RealVector loss;
};

struct CountsMatrix {
  CountMatrix counts;
  std::vector<std::int64_t> shots;
};

/// Average coincidences per state in the reference experiment.
inline constexpr std::int64_t kExperimentalShots = 1117;

enum class SamplingMode { Multinomial, Poisson };

struct SamplingOptions {
  SamplingMode mode = SamplingMode::Multinomial;
  /// State-independent extra transmission applied to every outcome.
  double eta_extra = 1.0;
};

/// p_b = eta_extra Tr(mu_b rho), loss = 1 - sum_b p_b. Entries down to -1e-12
/// are clamped to zero; anything more negative throws PovmError.
ProbabilityVector outcome_probabilities(const ComplexMatrix& rho, const EffectivePovm& povm, double eta_extra = 1.0);

/// One multinomial draw of `shots` events over the outcomes plus a loss
/// category, or independent Poisson(shots p_b) counts in Poisson mode.
CountsVector sample_counts(const ProbabilityVector& p, std::int64_t shots, std::uint64_t seed,
                           SamplingMode mode = SamplingMode::Multinomial);

/// counts_b / sum_b' counts_b'; throws EmptyStatisticsError on all-zero counts.
RealVector normalize_counts(const CountsVector& c);

/// (1 - p) p_ent + p p_sep, loss included.
ProbabilityVector mix_distributions(const ProbabilityVector& p_ent, const ProbabilityVector& p_sep, double p);

ProbabilityMatrix probability_matrix(const std::vector<ComplexMatrix>& states, const EffectivePovm& povm,
                                     double eta_extra = 1.0);

ProbabilityVector column(const ProbabilityMatrix& m, Index k);

/// Samples every column of `exact`; column k uses stream (seed, k).
CountsMatrix sample_matrix(const ProbabilityMatrix& exact, std::int64_t shots, std::uint64_t seed,
                           SamplingMode mode = SamplingMode::Multinomial);

struct MeasurementData {
  ProbabilityMatrix exact;
  std::optional<CountsMatrix> counts;  // absent in the infinite-statistics limit
};

/// Exact probabilities for every state of d and, when shots is set, counts.
MeasurementData build_matrices(const Dataset& d, const EffectivePovm& povm, std::optional<std::int64_t> shots,
                               std::uint64_t seed, const SamplingOptions& options = {});

}  // namespace qelm

#endif  // QELM_SAMPLING_HPP
