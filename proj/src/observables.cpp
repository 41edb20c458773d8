#include "qelm/observables.hpp"

#include <array>

namespace qelm {

namespace {

constexpr std::array<char, 4> kPauliLetters{'I', 'X', 'Y', 'Z'};

}  // namespace

Observable make_observable(std::string name, ComplexMatrix matrix) {
  if (!is_hermitian(matrix, kStructuralTol)) throw ContractViolation("observable '" + name + "' is not Hermitian");
  return {std::move(name), std::move(matrix)};
}

ComplexMatrix pauli(int j) {
  ComplexMatrix m(2, 2);
  switch (j) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -kI, kI, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw ContractViolation("pauli: index must be in 0..3");
  }
  return m;
}

Observable pauli_product(int j, int k) {
  const ComplexMatrix m = tensor_product(pauli(j), pauli(k));
  return {std::string{kPauliLetters[static_cast<std::size_t>(j)], kPauliLetters[static_cast<std::size_t>(k)]}, m};
}

Ket bell_ket(BellState s) {
  const double r = 1.0 / std::sqrt(2.0);
  ComplexVector v = ComplexVector::Zero(4);
  switch (s) {
    case BellState::PhiPlus: v(0) = r; v(3) = r; break;
    case BellState::PhiMinus: v(0) = r; v(3) = -r; break;
    case BellState::PsiPlus: v(1) = r; v(2) = r; break;
    case BellState::PsiMinus: v(1) = r; v(2) = -r; break;
  }
  return Ket(v);
}

WitnessSpec bell_witness(int i) {
  static const std::array<const char*, 4> names{"W_Phi+", "W_Phi-", "W_Psi+", "W_Psi-"};
  if (i < 1 || i > 4) throw ContractViolation("bell_witness: index must be in 1..4");
  const Ket target = bell_ket(static_cast<BellState>(i));
  const ComplexMatrix w = 0.5 * ComplexMatrix::Identity(4, 4) - target.projector();
  return {target, 0.5, {names[static_cast<std::size_t>(i - 1)], w}};
}

double max_separable_overlap(const Ket& psi) {
  if (psi.dim() != 4) throw ContractViolation("max_separable_overlap: expected a two-qubit ket");
  Eigen::Matrix2cd amplitudes;
  amplitudes << psi.amplitudes()(0), psi.amplitudes()(1), psi.amplitudes()(2), psi.amplitudes()(3);
  const double s_max = singular_values(amplitudes)(0);
  return s_max * s_max;
}

WitnessSpec general_witness(const Ket& psi, std::string name) {
  const double alpha = max_separable_overlap(psi);
  ComplexMatrix w = alpha * ComplexMatrix::Identity(4, 4) - psi.projector();
  return {psi, alpha, {std::move(name), std::move(w)}};
}

std::vector<Observable> default_targets() {
  std::vector<Observable> out;
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      if (j != 0 || k != 0) out.push_back(pauli_product(j, k));
    }
  }
  for (int i = 1; i <= 4; ++i) out.push_back(bell_witness(i).observable);
  return out;
}

std::vector<Observable> registered_observables() {
  std::vector<Observable> out{pauli_product(0, 0)};
  for (Observable& o : default_targets()) out.push_back(std::move(o));
  return out;
}

Observable observable_by_name(const std::string& name) {
  for (Observable& o : registered_observables()) {
    if (o.name == name) return o;
  }
  throw ConfigError("unknown observable '" + name + "'");
}

RealMatrix expectation_matrix(const std::vector<Observable>& obs, const std::vector<ComplexMatrix>& states) {
  RealMatrix m(static_cast<Index>(obs.size()), static_cast<Index>(states.size()));
  for (std::size_t j = 0; j < obs.size(); ++j) {
    for (std::size_t k = 0; k < states.size(); ++k) {
      m(static_cast<Index>(j), static_cast<Index>(k)) = expectation_value(obs[j].matrix, states[k]);
    }
  }
  return m;
}

}  // namespace qelm
