#include "qelm/reservoir.hpp"

#include "qelm/waveplates.hpp"

namespace qelm {

namespace {

Index oam_slot(int n, int halfwidth) { return n + halfwidth; }

Index site(int pol, int n, int halfwidth) {
  return static_cast<Index>(pol) * (2 * halfwidth + 1) + oam_slot(n, halfwidth);
}

constexpr int kL = 0;
constexpr int kR = 1;

}  // namespace

std::vector<OutcomeLabel> two_photon_outcome_labels() {
  std::vector<OutcomeLabel> labels;
  labels.reserve(static_cast<std::size_t>(kOutcomes));
  for (int n1 = -kOutcomeHalfwidth; n1 <= kOutcomeHalfwidth; ++n1) {
    for (int n2 = -kOutcomeHalfwidth; n2 <= kOutcomeHalfwidth; ++n2) labels.push_back({n1, n2});
  }
  return labels;
}

EffectivePovm::EffectivePovm(std::vector<ComplexMatrix> effects, std::vector<OutcomeLabel> labels, double tol)
    : effects_(std::move(effects)), labels_(std::move(labels)) {
  if (effects_.empty()) throw PovmError("effective POVM: no effects");
  const Index d = effects_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const ComplexMatrix& e : effects_) {
    if (e.rows() != d || e.cols() != d) throw PovmError("effective POVM: effect dimensions differ");
    if (!is_hermitian(e, tol)) throw PovmError("effective POVM: effect is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (e + e.adjoint()), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -tol) throw PovmError("effective POVM: effect is not positive");
    sum += e;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (sum + sum.adjoint()), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().maxCoeff() > 1.0 + tol) throw PovmError("effective POVM: effects sum above identity");
  if (!labels_.empty() && labels_.size() != effects_.size()) {
    throw PovmError("effective POVM: label count differs from effect count");
  }
}

ComplexMatrix EffectivePovm::total() const {
  ComplexMatrix sum = ComplexMatrix::Zero(dim(), dim());
  for (const ComplexMatrix& e : effects_) sum += e;
  return sum;
}

ComplexMatrix EffectivePovm::vectorized() const {
  ComplexMatrix v(dim() * dim(), size());
  for (Index b = 0; b < size(); ++b) v.col(b) = vectorize(effect(b));
  return v;
}

ComplexMatrix coin_operator(const CoinAngles& c) {
  const double eta = c.zeta - 2.0 * c.theta + c.phi;
  ComplexMatrix m(2, 2);
  m(0, 0) = std::polar(1.0, -(c.zeta - c.phi)) * std::cos(eta);
  m(0, 1) = std::polar(1.0, c.zeta + c.phi) * std::sin(eta);
  m(1, 0) = -std::polar(1.0, -(c.zeta + c.phi)) * std::sin(eta);
  m(1, 1) = std::polar(1.0, c.zeta - c.phi) * std::cos(eta);
  return m;
}

ComplexMatrix shift_operator(const QPlateSetting& q, int oam_halfwidth) {
  if (oam_halfwidth < 1) throw ContractViolation("shift_operator: OAM half-width must be at least 1");
  const int n_max = oam_halfwidth;
  const Index dim = 2 * (2 * n_max + 1);
  ComplexMatrix s = ComplexMatrix::Identity(dim, dim);
  const double c = std::cos(q.delta / 2.0);
  const Complex coupling = kI * std::sin(q.delta / 2.0) * std::polar(1.0, 2.0 * q.alpha);
  for (int n = -n_max; n < n_max; ++n) {
    const Index l = site(kL, n, n_max);
    const Index r = site(kR, n + 1, n_max);
    s(l, l) = c;
    s(r, r) = c;
    s(l, r) = coupling;
    s(r, l) = kI * std::sin(q.delta / 2.0) * std::polar(1.0, -2.0 * q.alpha);
  }
  return s;
}

ComplexMatrix single_walk_unitary(const WalkConfig& w, int oam_halfwidth) {
  const Index oam_dim = 2 * oam_halfwidth + 1;
  const ComplexMatrix coin = tensor_product(coin_operator(w.coin), ComplexMatrix::Identity(oam_dim, oam_dim));
  return shift_operator(w.qplate2, oam_halfwidth) * coin * shift_operator(w.qplate1, oam_halfwidth);
}

ComplexMatrix photon_contraction(const WalkConfig& w, const Ket& eta, int oam_halfwidth) {
  if (eta.dim() != 2) throw ContractViolation("photon_contraction: projection must be a polarization ket");
  if (oam_halfwidth < kOutcomeHalfwidth) {
    throw ContractViolation("photon_contraction: OAM half-width must cover the detected range");
  }
  const int n_max = oam_halfwidth;
  const Index oam_dim = 2 * n_max + 1;
  const ComplexMatrix u = single_walk_unitary(w, n_max);

  // Input: H/V polarization at OAM 0, expressed in circular coordinates.
  const ComplexMatrix hv_to_circ = circular_to_hv().adjoint();
  ComplexMatrix inject = ComplexMatrix::Zero(2 * oam_dim, 2);
  for (int pol = 0; pol < 2; ++pol) {
    for (int hv = 0; hv < 2; ++hv) inject(site(pol, 0, n_max), hv) = hv_to_circ(pol, hv);
  }
  // <eta| in circular coordinates: (T^dagger eta)^dagger = eta^dagger T.
  const ComplexVector eta_circ = circular_to_hv().adjoint() * eta.amplitudes();
  ComplexMatrix detect = ComplexMatrix::Zero(kOutcomesPerPhoton, 2 * oam_dim);
  for (int n = -kOutcomeHalfwidth; n <= kOutcomeHalfwidth; ++n) {
    for (int pol = 0; pol < 2; ++pol) {
      detect(n + kOutcomeHalfwidth, site(pol, n, n_max)) = std::conj(eta_circ(pol));
    }
  }
  return detect * u * inject;
}

ComplexMatrix two_photon_unitary(const ReservoirConfig& cfg) {
  return tensor_product(single_walk_unitary(cfg.walk_a, cfg.oam_internal_halfwidth),
                        single_walk_unitary(cfg.walk_b, cfg.oam_internal_halfwidth));
}

ComplexMatrix channel_contraction(const ReservoirConfig& cfg) {
  if (cfg.oam_internal_halfwidth < kOutcomeHalfwidth) {
    throw ContractViolation("channel_contraction: oam_internal_halfwidth must be at least 2");
  }
  // The two walks act on separate photons, so the contraction factorizes.
  return tensor_product(photon_contraction(cfg.walk_a, cfg.projection_a, cfg.oam_internal_halfwidth),
                        photon_contraction(cfg.walk_b, cfg.projection_b, cfg.oam_internal_halfwidth));
}

EffectivePovm effective_povm_from_contraction(const ComplexMatrix& k) {
  std::vector<ComplexMatrix> effects;
  effects.reserve(static_cast<std::size_t>(k.rows()));
  for (Index b = 0; b < k.rows(); ++b) {
    const ComplexMatrix row = k.row(b);
    effects.push_back(row.adjoint() * row);
  }
  std::vector<OutcomeLabel> labels;
  if (k.rows() == kOutcomes) labels = two_photon_outcome_labels();
  return EffectivePovm(std::move(effects), std::move(labels));
}

EffectivePovm effective_povm(const ReservoirConfig& cfg) {
  return effective_povm_from_contraction(channel_contraction(cfg));
}

ReservoirConfig swap_coin_qwp_angles(ReservoirConfig cfg) {
  std::swap(cfg.walk_a.coin.zeta, cfg.walk_a.coin.phi);
  std::swap(cfg.walk_b.coin.zeta, cfg.walk_b.coin.phi);
  return cfg;
}

}  // namespace qelm
