// Two-photon quantum-walk reservoir.
//
// Each photon walks two steps on its orbital-angular-momentum (OAM) ladder:
// a partial q-plate shift (delta = pi/2), a waveplate coin, then a full
// q-plate shift (delta = pi). Polarization is then projected onto a fixed
// |eta> and the OAM values n in [-2, 2] are detected in coincidence, giving
// 25 outcomes. The whole apparatus collapses to a 25 x 4 contraction K from
// the input polarization amplitudes to the detected OAM amplitudes, and the
// effective POVM on the input is mu_b = K^dagger |b><b| K.
//
// Single-photon basis: (polarization L, R) (x) (OAM -N..N), index
// pol * (2N + 1) + (n + N). Two-photon outcome index b = 5 (n1 + 2) + (n2 + 2).
#ifndef QELM_RESERVOIR_HPP
#define QELM_RESERVOIR_HPP

#include <string>
#include <vector>

#include "qelm/linalg.hpp"

namespace qelm {

inline constexpr int kOutcomeHalfwidth = 2;
inline constexpr Index kOutcomesPerPhoton = 2 * kOutcomeHalfwidth + 1;
inline constexpr Index kOutcomes = kOutcomesPerPhoton * kOutcomesPerPhoton;
inline constexpr Index kInputDim = 4;
inline constexpr int kDefaultOamHalfwidth = 4;

// Q-plate optical-axis offsets fixed by fabrication, in degrees.
inline constexpr double kWalkAAlpha1Deg = 19.0;
inline constexpr double kWalkAAlpha2Deg = 77.0;
inline constexpr double kWalkBAlpha1Deg = 336.0;
inline constexpr double kWalkBAlpha2Deg = 163.0;

struct CoinAngles {
  double zeta = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct QPlateSetting {
  double alpha = 0.0;  // optical-axis offset
  double delta = 0.0;  // tuning
};

struct WalkConfig {
  QPlateSetting qplate1{0.0, kPi / 2.0};
  CoinAngles coin;
  QPlateSetting qplate2{0.0, kPi};

  static WalkConfig with_alphas(const CoinAngles& coin, double alpha1, double alpha2) {
    return {{alpha1, kPi / 2.0}, coin, {alpha2, kPi}};
  }
};

struct ReservoirConfig {
  WalkConfig walk_a = WalkConfig::with_alphas({}, deg2rad(kWalkAAlpha1Deg), deg2rad(kWalkAAlpha2Deg));
  WalkConfig walk_b = WalkConfig::with_alphas({}, deg2rad(kWalkBAlpha1Deg), deg2rad(kWalkBAlpha2Deg));
  Ket projection_a = Ket(ComplexVector::Unit(2, 0));
  Ket projection_b = Ket(ComplexVector::Unit(2, 0));
  int oam_internal_halfwidth = kDefaultOamHalfwidth;
};

struct OutcomeLabel {
  int n1 = 0;
  int n2 = 0;
};

inline Index outcome_index(int n1, int n2) {
  return kOutcomesPerPhoton * (n1 + kOutcomeHalfwidth) + (n2 + kOutcomeHalfwidth);
}

/// The 25 two-photon labels in outcome-index order.
std::vector<OutcomeLabel> two_photon_outcome_labels();

/// Sub-normalized POVM on the input space: every effect is PSD and the effects
/// sum to at most the identity (post-selection discards the rest).
class EffectivePovm {
 public:
  /// Validates positivity and sub-normalization at tol; throws PovmError.
  explicit EffectivePovm(std::vector<ComplexMatrix> effects, std::vector<OutcomeLabel> labels = {},
                         double tol = kStructuralTol);

  const std::vector<ComplexMatrix>& effects() const { return effects_; }
  const std::vector<OutcomeLabel>& labels() const { return labels_; }
  const ComplexMatrix& effect(Index b) const { return effects_[static_cast<std::size_t>(b)]; }
  Index size() const { return static_cast<Index>(effects_.size()); }
  Index dim() const { return effects_.front().rows(); }
  ComplexMatrix total() const;

  /// dim^2 x size matrix whose columns are vec(mu_b).
  ComplexMatrix vectorized() const;

 private:
  std::vector<ComplexMatrix> effects_;
  std::vector<OutcomeLabel> labels_;
};

/// Waveplate coin in the circular basis, with eta = zeta - 2 theta + phi:
/// [[e^{-i(zeta-phi)} cos eta,  e^{i(zeta+phi)} sin eta],
///  [-e^{-i(zeta+phi)} sin eta, e^{i(zeta-phi)} cos eta]].
ComplexMatrix coin_operator(const CoinAngles& c);

/// Q-plate controlled shift on a truncated OAM ladder of half-width N,
/// dimension 2 (2N + 1). Couples |L, n> and |R, n + 1> with
/// [[cos(delta/2), i sin(delta/2) e^{2 i alpha}], [i sin(delta/2) e^{-2 i alpha}, cos(delta/2)]].
/// Every pair (L n, R n+1) with n in [-N, N-1] gets the full block so the
/// operator is unitary; the two unpaired components |R, -N> and |L, N> are
/// left untouched.
ComplexMatrix shift_operator(const QPlateSetting& q, int oam_halfwidth);

/// S(alpha2, delta2) (C (x) I_OAM) S(alpha1, delta1).
ComplexMatrix single_walk_unitary(const WalkConfig& w, int oam_halfwidth);

/// 5 x 2 map from the photon's input polarization (H/V amplitudes, OAM 0) to
/// detected OAM amplitudes n in [-2, 2] after projecting on |eta>.
ComplexMatrix photon_contraction(const WalkConfig& w, const Ket& eta, int oam_halfwidth);

/// Full two-photon walk U_a (x) U_b on (pol_a (x) oam_a) (x) (pol_b (x) oam_b).
ComplexMatrix two_photon_unitary(const ReservoirConfig& cfg);

/// 25 x 4 contraction K from H/V two-qubit amplitudes to detected amplitudes.
ComplexMatrix channel_contraction(const ReservoirConfig& cfg);

EffectivePovm effective_povm(const ReservoirConfig& cfg);
EffectivePovm effective_povm_from_contraction(const ComplexMatrix& k);

/// R1 -> R2 style perturbation: swap the two coin QWP angles (zeta, phi) on
/// both walks.
ReservoirConfig swap_coin_qwp_angles(ReservoirConfig cfg);

}  // namespace qelm

#endif  // QELM_RESERVOIR_HPP
