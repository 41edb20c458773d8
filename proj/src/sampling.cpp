#include "qelm/sampling.hpp"

#include <algorithm>

#include "qelm/rng.hpp"

namespace qelm {

ProbabilityVector outcome_probabilities(const ComplexMatrix& rho, const EffectivePovm& povm, double eta_extra) {
  if (rho.rows() != povm.dim() || rho.cols() != povm.dim()) {
    throw ContractViolation("outcome_probabilities: dimension mismatch");
  }
  if (!(eta_extra > 0.0 && eta_extra <= 1.0)) throw ContractViolation("outcome_probabilities: eta_extra outside (0, 1]");
  ProbabilityVector out;
  out.probs.resize(povm.size());
  for (Index b = 0; b < povm.size(); ++b) {
    // Tr(mu rho) = sum_ij mu_ij rho_ji
    double v = (povm.effect(b).transpose().cwiseProduct(rho)).sum().real();
    if (v < -kStructuralTol) throw PovmError("outcome_probabilities: negative outcome probability");
    out.probs(b) = eta_extra * std::max(v, 0.0);
  }
  out.loss = 1.0 - out.probs.sum();
  if (out.loss < -kDerivedTol) throw PovmError("outcome_probabilities: probabilities sum above one");
  out.loss = std::max(out.loss, 0.0);
  return out;
}

CountsVector sample_counts(const ProbabilityVector& p, std::int64_t shots, std::uint64_t seed, SamplingMode mode) {
  if (shots < 0) throw ContractViolation("sample_counts: negative shot count");
  CountsVector out{CountVector::Zero(p.probs.size()), shots};
  if (shots == 0) return out;
  Rng rng(seed);
  if (mode == SamplingMode::Poisson) {
    for (Index b = 0; b < p.probs.size(); ++b) {
      const double mean = static_cast<double>(shots) * p.probs(b);
      if (mean > 0.0) out.counts(b) = std::poisson_distribution<std::int64_t>(mean)(rng);
    }
    return out;
  }
  // Multinomial over outcomes + loss by sequential conditional binomials.
  std::int64_t remaining = shots;
  double mass = p.probs.sum() + p.loss;
  for (Index b = 0; b < p.probs.size() && remaining > 0; ++b) {
    const double pb = p.probs(b);
    if (pb <= 0.0) {
      continue;
    }
    const double q = std::clamp(pb / mass, 0.0, 1.0);
    const std::int64_t k = q >= 1.0 ? remaining : std::binomial_distribution<std::int64_t>(remaining, q)(rng);
    out.counts(b) = k;
    remaining -= k;
    mass -= pb;
    if (mass <= 0.0) break;
  }
  return out;
}

RealVector normalize_counts(const CountsVector& c) {
  const std::int64_t total = c.counts.sum();
  if (total <= 0) throw EmptyStatisticsError("normalize_counts: no observed counts");
  return c.counts.cast<double>() / static_cast<double>(total);
}

ProbabilityVector mix_distributions(const ProbabilityVector& p_ent, const ProbabilityVector& p_sep, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("mix_distributions: p outside [0, 1]");
  if (p_ent.probs.size() != p_sep.probs.size()) throw ContractViolation("mix_distributions: size mismatch");
  return {(1.0 - p) * p_ent.probs + p * p_sep.probs, (1.0 - p) * p_ent.loss + p * p_sep.loss};
}

ProbabilityMatrix probability_matrix(const std::vector<ComplexMatrix>& states, const EffectivePovm& povm,
                                     double eta_extra) {
  ProbabilityMatrix m{RealMatrix(povm.size(), static_cast<Index>(states.size())),
                      RealVector(static_cast<Index>(states.size()))};
  for (std::size_t k = 0; k < states.size(); ++k) {
    const ProbabilityVector p = outcome_probabilities(states[k], povm, eta_extra);
    m.probs.col(static_cast<Index>(k)) = p.probs;
    m.loss(static_cast<Index>(k)) = p.loss;
  }
  return m;
}

ProbabilityVector column(const ProbabilityMatrix& m, Index k) { return {m.probs.col(k), m.loss(k)}; }

CountsMatrix sample_matrix(const ProbabilityMatrix& exact, std::int64_t shots, std::uint64_t seed, SamplingMode mode) {
  CountsMatrix out{CountMatrix(exact.probs.rows(), exact.probs.cols()),
                   std::vector<std::int64_t>(static_cast<std::size_t>(exact.probs.cols()), shots)};
  for (Index k = 0; k < exact.probs.cols(); ++k) {
    const CountsVector c =
        sample_counts(column(exact, k), shots, derive_seed(seed, {static_cast<std::uint64_t>(k)}), mode);
    out.counts.col(k) = c.counts;
  }
  return out;
}

MeasurementData build_matrices(const Dataset& d, const EffectivePovm& povm, std::optional<std::int64_t> shots,
                               std::uint64_t seed, const SamplingOptions& options) {
  MeasurementData out{probability_matrix(d.density_matrices(), povm, options.eta_extra), std::nullopt};
  if (shots) out.counts = sample_matrix(out.exact, *shots, seed, options.mode);
  return out;
}

}  // namespace qelm
