#include "qelm/harness/throughput.hpp"

#include <cmath>

namespace qelm::harness {

void LossModel::validate() const {
  const std::pair<const char*, double> etas[] = {
      {"eta_qp", eta_qp}, {"eta_qw", eta_qw}, {"eta_proj", eta_proj}, {"eta_slm", eta_slm}, {"eta_smf", eta_smf}};
  for (const auto& [name, v] : etas) {
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError(std::string("loss: ") + name + " must be in (0, 1]");
  }
  if (!(cc_source > 0.0) || !std::isfinite(cc_source)) throw ConfigError("loss: cc_source must be positive");
}

ThroughputEstimate throughput_estimate(const LossModel& loss) {
  loss.validate();
  const double per_photon = loss.eta_qw * loss.eta_proj * loss.eta_slm * loss.eta_smf;
  ThroughputEstimate t;
  t.total_hz = per_photon * per_photon * loss.cc_source;
  t.per_outcome_hz = t.total_hz / static_cast<double>(kOutcomes);
  return t;
}

Json loss_to_json(const LossModel& loss) {
  return {{"eta_qp", loss.eta_qp},   {"eta_qw", loss.eta_qw},   {"eta_proj", loss.eta_proj},
          {"eta_slm", loss.eta_slm}, {"eta_smf", loss.eta_smf}, {"cc_source", loss.cc_source}};
}

LossModel loss_from_json(const Json& j, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
  LossModel m;
  auto read = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) throw ConfigError(context + ": key '" + key + "' must be a number");
    field = j.at(key).get<double>();
  };
  read("eta_qp", m.eta_qp);
  read("eta_qw", m.eta_qw);
  read("eta_proj", m.eta_proj);
  read("eta_slm", m.eta_slm);
  read("eta_smf", m.eta_smf);
  read("cc_source", m.cc_source);
  for (const auto& [key, v] : j.items()) {
    if (key != "eta_qp" && key != "eta_qw" && key != "eta_proj" && key != "eta_slm" && key != "eta_smf" &&
        key != "cc_source") {
      throw ConfigError(context + ": unknown key '" + key + "'");
    }
  }
  m.validate();
  return m;
}

}  // namespace qelm::harness
