// Expected coincidence rate from per-element transmissions.
#ifndef QELM_HARNESS_THROUGHPUT_HPP
#define QELM_HARNESS_THROUGHPUT_HPP

#include "qelm/io.hpp"

namespace qelm::harness {

struct LossModel {
  double eta_qp = 0.80;  // single q-plate; already folded into eta_qw
  double eta_qw = 0.56;  // whole walk
  double eta_proj = 0.5;
  double eta_slm = 0.78;
  double eta_smf = 0.4;
  double cc_source = 20e3;  // Hz

  /// Throws ConfigError unless every eta is in (0, 1] and cc_source > 0.
  void validate() const;
};

struct ThroughputEstimate {
  double total_hz = 0.0;         // eta_qw^2 eta_proj^2 eta_slm^2 eta_smf^2 cc_source
  double per_outcome_hz = 0.0;   // total spread over the 25 detected outcomes
};

ThroughputEstimate throughput_estimate(const LossModel& loss);

Json loss_to_json(const LossModel& loss);
/// Missing keys keep their defaults.
LossModel loss_from_json(const Json& j, const std::string& context = "loss");

}  // namespace qelm::harness

#endif  // QELM_HARNESS_THROUGHPUT_HPP
