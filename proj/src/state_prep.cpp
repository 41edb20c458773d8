#include "qelm/state_prep.hpp"

#include <algorithm>
#include <array>

#include "qelm/observables.hpp"
#include "qelm/rng.hpp"
#include "qelm/waveplates.hpp"

namespace qelm {

namespace {

// Two-qubit H/V index: 2 * a + b.
constexpr Index kHH = 0;
constexpr Index kHV = 1;
constexpr Index kVH = 2;
constexpr Index kVV = 3;

struct TagName {
  ReferenceTag tag;
  const char* name;
};

constexpr std::array<TagName, 7> kTagNames{{{ReferenceTag::PsiPlus, "PsiPlus"},
                                            {ReferenceTag::VV, "VV"},
                                            {ReferenceTag::VH, "VH"},
                                            {ReferenceTag::HV, "HV"},
                                            {ReferenceTag::PsiPlusP1, "PsiPlusP1"},
                                            {ReferenceTag::PsiPlusP2, "PsiPlusP2"},
                                            {ReferenceTag::Custom, "Custom"}}};

ComplexVector basis_ket(Index i) { return ComplexVector::Unit(4, i); }

ComplexVector hv_vh_superposition(double w_hv, double w_vh) {
  ComplexVector v = ComplexVector::Zero(4);
  v(kHV) = std::sqrt(w_hv);
  v(kVH) = std::sqrt(w_vh);
  return v;
}

}  // namespace

ReferenceState reference_state(ReferenceTag tag) {
  switch (tag) {
    case ReferenceTag::PsiPlus: return {tag, Ket(hv_vh_superposition(0.5, 0.5)), true};
    case ReferenceTag::VV: return {tag, Ket(basis_ket(kVV)), false};
    case ReferenceTag::VH: return {tag, Ket(basis_ket(kVH)), false};
    case ReferenceTag::HV: return {tag, Ket(basis_ket(kHV)), false};
    case ReferenceTag::PsiPlusP1: return {tag, Ket(hv_vh_superposition(0.25, 0.75)), true};
    case ReferenceTag::PsiPlusP2: return {tag, Ket(hv_vh_superposition(0.2, 0.8)), true};
    case ReferenceTag::Custom: break;
  }
  throw ContractViolation("reference_state: Custom references need an explicit ket");
}

ReferenceState custom_reference(const Ket& ket, bool entangled) {
  if (ket.dim() != 4) throw ContractViolation("custom_reference: expected a two-qubit ket");
  return {ReferenceTag::Custom, ket, entangled};
}

std::string to_string(ReferenceTag tag) {
  for (const TagName& t : kTagNames) {
    if (t.tag == tag) return t.name;
  }
  return "Custom";
}

ReferenceTag reference_tag_from_string(const std::string& s) {
  for (const TagName& t : kTagNames) {
    if (s == t.name) return t.tag;
  }
  throw ConfigError("unknown reference state '" + s + "'");
}

std::string to_string(StateLabel label) {
  switch (label) {
    case StateLabel::Separable: return "separable";
    case StateLabel::Entangled: return "entangled";
    case StateLabel::Partial: return "partial";
  }
  return "separable";
}

StateLabel state_label_from_string(const std::string& s) {
  if (s == "separable") return StateLabel::Separable;
  if (s == "entangled") return StateLabel::Entangled;
  if (s == "partial") return StateLabel::Partial;
  throw ConfigError("unknown state label '" + s + "'");
}

StateLabel label_for(const ReferenceState& ref) {
  switch (ref.tag) {
    case ReferenceTag::PsiPlus: return StateLabel::Entangled;
    case ReferenceTag::PsiPlusP1:
    case ReferenceTag::PsiPlusP2: return StateLabel::Partial;
    case ReferenceTag::VV:
    case ReferenceTag::VH:
    case ReferenceTag::HV: return StateLabel::Separable;
    case ReferenceTag::Custom: break;
  }
  return ref.entangled ? StateLabel::Entangled : StateLabel::Separable;
}

std::string to_string(PrepMode mode) {
  return mode == PrepMode::SameAngles ? "same_angles" : "independent_angles";
}

PrepMode prep_mode_from_string(const std::string& s) {
  if (s == "same_angles") return PrepMode::SameAngles;
  if (s == "independent_angles") return PrepMode::IndependentAngles;
  throw ConfigError("unknown preparation mode '" + s + "'");
}

double LabeledState::truth(const std::string& observable) const {
  const auto it = true_values.find(observable);
  if (it == true_values.end()) throw ContractViolation("no true value stored for '" + observable + "'");
  return it->second;
}

std::vector<ComplexMatrix> Dataset::density_matrices() const {
  std::vector<ComplexMatrix> out;
  out.reserve(states.size());
  for (const LabeledState& s : states) out.push_back(s.rho.matrix());
  return out;
}

std::vector<std::size_t> Dataset::indices_with(std::initializer_list<StateLabel> labels) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (std::find(labels.begin(), labels.end(), states[i].label) != labels.end()) out.push_back(i);
  }
  return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.seed = seed;
  out.mode = mode;
  out.states.reserve(indices.size());
  for (std::size_t i : indices) out.states.push_back(states.at(i));
  return out;
}

ComplexVector prepared_ket(const ReferenceState& ref, const PreparationAngles& angles) {
  const ComplexMatrix u = tensor_product(prep_unitary(angles.phi_a, angles.theta_a),
                                         prep_unitary(angles.phi_b, angles.theta_b));
  return u * ref.ket.amplitudes();
}

void check_angles(const PreparationAngles& angles, PrepMode mode) {
  const std::array<double, 4> all{angles.phi_a, angles.theta_a, angles.phi_b, angles.theta_b};
  for (double a : all) {
    if (!std::isfinite(a)) throw ContractViolation("preparation angles must be finite");
  }
  if (mode == PrepMode::SameAngles && (angles.phi_a != angles.phi_b || angles.theta_a != angles.theta_b)) {
    throw ContractViolation("same-angle mode requires identical angles on both arms");
  }
}

LabeledState prepare_input(const ReferenceState& ref, const PreparationAngles& angles,
                           const std::optional<ReferenceState>& truth_reference) {
  const ReferenceState& truth_ref = truth_reference ? *truth_reference : ref;
  const ComplexVector psi = prepared_ket(ref, angles);
  DensityMatrix rho(psi * psi.adjoint());
  ComplexMatrix truth_rho = rho.matrix();
  if (truth_reference) {
    const ComplexVector t = prepared_ket(truth_ref, angles);
    truth_rho = t * t.adjoint();
  }
  std::map<std::string, double> values;
  for (const Observable& o : registered_observables()) values[o.name] = expectation_value(o.matrix, truth_rho);
  return {std::move(rho), label_for(ref), angles, ref, truth_ref, std::move(values)};
}

PreparationAngles sample_angles(PrepMode mode, std::uint64_t seed, std::uint64_t index) {
  Rng rng(derive_seed(seed, {index}));
  PreparationAngles a;
  a.phi_a = kPi * uniform01(rng);
  a.theta_a = kPi * uniform01(rng);
  if (mode == PrepMode::SameAngles) {
    a.phi_b = a.phi_a;
    a.theta_b = a.theta_a;
  } else {
    a.phi_b = kPi * uniform01(rng);
    a.theta_b = kPi * uniform01(rng);
  }
  return a;
}

void append_states(Dataset& d, const ReferenceState& ref, std::size_t n, std::uint64_t offset,
                   const std::optional<ReferenceState>& mislabel_as) {
  d.states.reserve(d.states.size() + n);
  for (std::size_t k = 0; k < n; ++k) {
    d.states.push_back(prepare_input(ref, sample_angles(d.mode, d.seed, offset + k), mislabel_as));
  }
}

Dataset generate_dataset(const ReferenceState& ref_sep, const ReferenceState& ref_ent, std::size_t n_sep,
                         std::size_t n_ent, PrepMode mode, std::uint64_t seed) {
  Dataset d;
  d.seed = seed;
  d.mode = mode;
  append_states(d, ref_sep, n_sep, 0);
  append_states(d, ref_ent, n_ent, n_sep);
  return d;
}

SpanRanks span_ranks(const Dataset& d, double tol) {
  if (d.states.empty()) throw ContractViolation("span_ranks: empty dataset");
  auto rank_of = [&](const std::vector<std::size_t>& idx) -> Index {
    if (idx.empty()) return 0;
    ComplexMatrix rows(static_cast<Index>(idx.size()), 16);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      rows.row(static_cast<Index>(r)) = vectorize(d.states[idx[r]].rho.matrix()).transpose();
    }
    return numerical_rank(rows, tol);
  };
  SpanRanks out;
  out.sep = rank_of(d.indices_with({StateLabel::Separable}));
  out.ent = rank_of(d.indices_with({StateLabel::Entangled, StateLabel::Partial}));
  out.all = rank_of(d.indices_with({StateLabel::Separable, StateLabel::Entangled, StateLabel::Partial}));
  return out;
}

Dataset angle_mismatch_dataset(const Dataset& d, double delta_std, std::uint64_t seed) {
  if (!(delta_std >= 0.0)) throw ContractViolation("angle_mismatch_dataset: delta_std must be non-negative");
  if (delta_std == 0.0) return d;
  Dataset out;
  out.seed = d.seed;
  out.mode = PrepMode::IndependentAngles;
  out.states.reserve(d.states.size());
  for (std::size_t k = 0; k < d.states.size(); ++k) {
    const LabeledState& s = d.states[k];
    Rng rng(derive_seed(seed, {k}));
    PreparationAngles a = s.prep;
    a.phi_b += delta_std * standard_normal(rng);
    a.theta_b += delta_std * standard_normal(rng);
    const bool relabeled = s.truth_reference.tag != s.reference.tag ||
                           (s.truth_reference.ket.amplitudes() - s.reference.ket.amplitudes()).norm() != 0.0;
    out.states.push_back(prepare_input(s.reference, a,
                                       relabeled ? std::optional<ReferenceState>(s.truth_reference) : std::nullopt));
  }
  return out;
}

}  // namespace qelm
