#include "qelm/waveplates.hpp"

#include <array>

#include "qelm/nelder_mead.hpp"

namespace qelm {

namespace {

Eigen::Matrix2cd rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2cd r;
  r << c, -s, s, c;
  return r;
}

double projection_defect(const Ket& eta, double theta_proj, double phi_proj) {
  const ComplexVector out = qwp(theta_proj) * hwp(phi_proj) * eta.amplitudes();
  return 1.0 - std::norm(out(0));
}

}  // namespace

ComplexMatrix hwp(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  ComplexMatrix m(2, 2);
  m << c, s, s, -c;
  return m;
}

ComplexMatrix qwp(double theta) {
  Eigen::Matrix2cd retarder = Eigen::Matrix2cd::Zero();
  retarder(0, 0) = 1.0;
  retarder(1, 1) = kI;
  return rotation(theta) * retarder * rotation(-theta);
}

ComplexMatrix prep_unitary(double phi, double theta) { return qwp(phi) * hwp(theta); }

const ComplexMatrix& circular_to_hv() {
  static const ComplexMatrix t = [] {
    ComplexMatrix m(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    m << r, r, kI * r, -kI * r;
    return m;
  }();
  return t;
}

Ket polarization_ket(double theta_p, double phi_p) {
  ComplexVector v(2);
  v << std::cos(theta_p), std::polar(1.0, phi_p) * std::sin(theta_p);
  return Ket(v);
}

ProjectionWaveplates projection_waveplates(const Ket& eta) {
  if (eta.dim() != 2) throw ContractViolation("projection_waveplates: expected a polarization ket");
  const Complex a = eta.amplitudes()(0);
  const Complex b = eta.amplitudes()(1);
  const double s1 = std::norm(a) - std::norm(b);
  const double s2 = 2.0 * (std::conj(a) * b).real();
  const double s3 = 2.0 * (std::conj(a) * b).imag();
  const double azimuth = 0.5 * std::atan2(s2, s1);
  const double ellipticity = 0.5 * std::asin(std::clamp(s3, -1.0, 1.0));

  // A QWP aligned with the ellipse axis linearizes the state; the HWP mirrors
  // the azimuth so that the linearized state lands on H. Sign conventions are
  // resolved by checking all candidates.
  ProjectionWaveplates best;
  double best_defect = 2.0;
  for (double qs : {1.0, -1.0}) {
    for (double hs : {1.0, -1.0}) {
      for (double shift : {0.0, 0.5 * kPi}) {
        const ProjectionWaveplates cand{qs * ellipticity, 0.5 * (azimuth + hs * ellipticity) + shift};
        const double d = projection_defect(eta, cand.theta_proj, cand.phi_proj);
        if (d < best_defect) {
          best_defect = d;
          best = cand;
        }
      }
    }
  }
  if (best_defect > 1e-14) {
    auto objective = [&](const Eigen::VectorXd& x) { return projection_defect(eta, x(0), x(1)); };
    Eigen::VectorXd x0(2);
    x0 << best.theta_proj, best.phi_proj;
    const SimplexResult r = nelder_mead(objective, x0, 0.05, 4000, 1e-18);
    if (r.value < best_defect) {
      best = {r.x(0), r.x(1)};
      best_defect = r.value;
    }
  }
  // defect = 1 - |<H|out>|^2, so |<H|out>| = 1 within 1e-10 needs defect < ~2e-10
  if (best_defect > 2e-10) throw NumericalError("projection_waveplates: no waveplate solution found");
  return best;
}

}  // namespace qelm
