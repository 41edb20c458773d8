#ifndef QELM_OBSERVABLES_HPP
#define QELM_OBSERVABLES_HPP

#include <string>
#include <vector>

#include "qelm/linalg.hpp"

namespace qelm {

struct Observable {
  std::string name;
  ComplexMatrix matrix;
};

/// Throws ContractViolation unless obs.matrix is Hermitian within 1e-12.
Observable make_observable(std::string name, ComplexMatrix matrix);

/// alpha I - |psi><psi|, non-negative on every separable state when alpha is
/// the largest separable overlap with psi.
struct WitnessSpec {
  Ket target;
  double alpha;
  Observable observable;
};

/// Single-qubit Pauli sigma_j, j = 0..3 with sigma_0 = I.
ComplexMatrix pauli(int j);

/// sigma_j (x) sigma_k, named e.g. "XZ" or "IY".
Observable pauli_product(int j, int k);

enum class BellState { PhiPlus = 1, PhiMinus = 2, PsiPlus = 3, PsiMinus = 4 };

/// |Phi+-> = (|HH> +- |VV>)/sqrt2, |Psi+-> = (|HV> +- |VH>)/sqrt2.
Ket bell_ket(BellState s);

/// W_i = I/2 - |Bell_i><Bell_i|, i = 1..4 in the order Phi+, Phi-, Psi+, Psi-.
/// Names: W_Phi+, W_Phi-, W_Psi+, W_Psi-.
WitnessSpec bell_witness(int i);

/// Largest squared Schmidt coefficient of a two-qubit pure state.
double max_separable_overlap(const Ket& psi);

WitnessSpec general_witness(const Ket& psi, std::string name = "W_custom");

/// The 15 non-identity Pauli products followed by the four Bell witnesses.
std::vector<Observable> default_targets();

/// Identity, 15 Pauli products and the four Bell witnesses: every observable
/// whose true value is stored with a prepared state.
std::vector<Observable> registered_observables();

/// Looks up a registered observable by name; throws ConfigError if unknown.
Observable observable_by_name(const std::string& name);

/// (N_obs x N_states) matrix of Tr(O_j rho_k).
RealMatrix expectation_matrix(const std::vector<Observable>& obs, const std::vector<ComplexMatrix>& states);

}  // namespace qelm

#endif  // QELM_OBSERVABLES_HPP
