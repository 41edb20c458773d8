#include "qelm/linalg.hpp"

#include <sstream>

namespace qelm {

std::string density_matrix_defect(const ComplexMatrix& m, double tol) {
  if (m.rows() == 0 || m.rows() != m.cols()) return "not a non-empty square matrix";
  if (!m.allFinite()) return "non-finite entries";
  if (!is_hermitian(m, tol)) return "not Hermitian";
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol) {
    std::ostringstream os;
    os << "trace " << tr.real() << " differs from 1";
    return os.str();
  }
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(herm, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -tol) {
    std::ostringstream os;
    os << "negative eigenvalue " << eig.eigenvalues().minCoeff();
    return os.str();
  }
  return {};
}

DensityMatrix::DensityMatrix(ComplexMatrix m, double tol) : m_(std::move(m)) {
  const std::string defect = density_matrix_defect(m_, tol);
  if (!defect.empty()) throw ContractViolation("invalid density matrix: " + defect);
}

DensityMatrix DensityMatrix::from_ket(const Ket& ket) { return DensityMatrix(ket.projector()); }

Ket::Ket(ComplexVector v, double tol) : v_(std::move(v)) {
  if (v_.size() == 0 || !v_.allFinite()) throw ContractViolation("ket: empty or non-finite amplitudes");
  if (std::abs(v_.norm() - 1.0) > tol) throw ContractViolation("ket: amplitudes are not unit norm");
}

Ket Ket::normalized(const ComplexVector& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw ContractViolation("ket: cannot normalize a zero vector");
  return Ket(v / n);
}

double expectation_value(const ComplexMatrix& obs, const ComplexMatrix& rho) {
  if (obs.rows() != rho.rows() || obs.cols() != rho.cols()) {
    throw ContractViolation("expectation_value: dimension mismatch");
  }
  if (!is_hermitian(obs, kStructuralTol)) throw ContractViolation("expectation_value: observable is not Hermitian");
  // Tr(O rho) = sum_ij O_ij rho_ji
  const Complex value = (obs.transpose().cwiseProduct(rho)).sum();
  if (std::abs(value.imag()) > kDerivedTol) {
    throw NumericalError("expectation_value: imaginary residue above tolerance");
  }
  return value.real();
}

double expectation_value(const ComplexMatrix& obs, const DensityMatrix& rho) {
  return expectation_value(obs, rho.matrix());
}

}  // namespace qelm
