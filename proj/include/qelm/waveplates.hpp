// Jones calculus for the waveplates used in state preparation and in the
// polarization projection stage. All matrices act on the H/V basis with
// |H> = (1, 0) and |V> = (0, 1).
#ifndef QELM_WAVEPLATES_HPP
#define QELM_WAVEPLATES_HPP

#include "qelm/linalg.hpp"

namespace qelm {

/// Half-wave plate with fast axis at angle theta:
/// [[cos 2t, sin 2t], [sin 2t, -cos 2t]].
ComplexMatrix hwp(double theta);

/// Quarter-wave plate R(theta) diag(1, i) R(-theta).
ComplexMatrix qwp(double theta);

/// Single-photon preparation unitary QWP(phi) HWP(theta).
ComplexMatrix prep_unitary(double phi, double theta);

/// Change of basis whose columns are |L> = (|H> + i|V>)/sqrt2 and
/// |R> = (|H> - i|V>)/sqrt2, in H/V coordinates. A vector with circular
/// coordinates c has H/V coordinates circular_to_hv() * c.
const ComplexMatrix& circular_to_hv();

/// cos(theta_p)|H> + e^{i phi_p} sin(theta_p)|V>.
Ket polarization_ket(double theta_p, double phi_p);

/// Waveplate angles for the projection stage.
struct ProjectionWaveplates {
  double theta_proj = 0.0;  // QWP angle
  double phi_proj = 0.0;    // HWP angle
};

/// Solves QWP(theta_proj) HWP(phi_proj) |eta> = |H> up to a global phase.
/// Throws NumericalError if no solution is found within 1e-10.
ProjectionWaveplates projection_waveplates(const Ket& eta);

}  // namespace qelm

#endif  // QELM_WAVEPLATES_HPP
