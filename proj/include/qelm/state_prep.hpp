// Labeled two-qubit input states: reference states (separable, maximally or
// partially entangled) transformed by random HWP-QWP preparation unitaries on
// each photon, either with the same angles on both arms or independent ones.
#ifndef QELM_STATE_PREP_HPP
#define QELM_STATE_PREP_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qelm/linalg.hpp"

namespace qelm {

enum class ReferenceTag { PsiPlus, VV, VH, HV, PsiPlusP1, PsiPlusP2, Custom };

struct ReferenceState {
  ReferenceTag tag;
  Ket ket;
  bool entangled;
};

/// Named references: PsiPlus = (|HV> + |VH>)/sqrt2,
/// P1 = sqrt(1/4)|HV> + sqrt(3/4)|VH>, P2 = sqrt(1/5)|HV> + sqrt(4/5)|VH>.
ReferenceState reference_state(ReferenceTag tag);
ReferenceState custom_reference(const Ket& ket, bool entangled);

std::string to_string(ReferenceTag tag);
ReferenceTag reference_tag_from_string(const std::string& s);

enum class StateLabel { Separable, Entangled, Partial };
std::string to_string(StateLabel label);
StateLabel state_label_from_string(const std::string& s);
StateLabel label_for(const ReferenceState& ref);

enum class PrepMode { SameAngles, IndependentAngles };
std::string to_string(PrepMode mode);
PrepMode prep_mode_from_string(const std::string& s);

struct PreparationAngles {
  double phi_a = 0.0;
  double theta_a = 0.0;
  double phi_b = 0.0;
  double theta_b = 0.0;
};

struct LabeledState {
  DensityMatrix rho;
  StateLabel label;
  PreparationAngles prep;
  ReferenceState reference;
  /// Reference whose prepared state defines true_values. Equals reference
  /// unless the state was deliberately mislabeled.
  ReferenceState truth_reference;
  std::map<std::string, double> true_values;

  double truth(const std::string& observable) const;
};

struct Dataset {
  std::vector<LabeledState> states;
  std::uint64_t seed = 0;
  PrepMode mode = PrepMode::SameAngles;

  std::vector<ComplexMatrix> density_matrices() const;
  /// Indices of states whose label is in `labels`.
  std::vector<std::size_t> indices_with(std::initializer_list<StateLabel> labels) const;
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

/// (U_a (x) U_b) |psi_ref> for preparation unitaries U = QWP(phi) HWP(theta).
ComplexVector prepared_ket(const ReferenceState& ref, const PreparationAngles& angles);

/// Prepares rho and fills true_values for every registered observable. When
/// truth_reference is given, true values are computed from that reference
/// with the same angles (mislabeling).
LabeledState prepare_input(const ReferenceState& ref, const PreparationAngles& angles,
                           const std::optional<ReferenceState>& truth_reference = std::nullopt);

/// Throws ContractViolation if same-angle mode is requested with differing arms.
void check_angles(const PreparationAngles& angles, PrepMode mode);

/// Uniform angles on [0, pi) for each waveplate.
PreparationAngles sample_angles(PrepMode mode, std::uint64_t seed, std::uint64_t index);

/// n_sep separable states followed by n_ent entangled states. Deterministic
/// under a fixed seed: state k draws its angles from stream (seed, k).
Dataset generate_dataset(const ReferenceState& ref_sep, const ReferenceState& ref_ent, std::size_t n_sep,
                         std::size_t n_ent, PrepMode mode, std::uint64_t seed);

/// Appends n states prepared from `ref`, drawing from streams (seed, offset + k).
/// With mislabel_as set, their true values are those of `mislabel_as`.
void append_states(Dataset& d, const ReferenceState& ref, std::size_t n, std::uint64_t offset,
                   const std::optional<ReferenceState>& mislabel_as = std::nullopt);

struct SpanRanks {
  Index sep = 0;
  Index ent = 0;
  Index all = 0;
};

/// Numerical ranks (relative tolerance) of the matrices whose rows are the
/// vectorized density matrices of the separable subset, the non-separable
/// subset and all states.
SpanRanks span_ranks(const Dataset& d, double tol = 1e-10);

/// Copy of d with arm b's (phi, theta) perturbed by independent N(0, delta_std^2)
/// draws; rho and true values are recomputed.
Dataset angle_mismatch_dataset(const Dataset& d, double delta_std, std::uint64_t seed);

}  // namespace qelm

#endif  // QELM_STATE_PREP_HPP
