// Dense complex linear algebra shared by every module.
//
// All matrices are Eigen dense types. Operator vectorization is column
// stacking: vec(X)(i + d*j) = X(i, j), which is Eigen's native storage order
// for column-major matrices. With this convention Tr(A^dagger B) equals
// vec(A)^dagger vec(B), so the frame superoperator and rank diagnostics are
// ordinary Gram-type matrices in vec space.
#ifndef QELM_LINALG_HPP
#define QELM_LINALG_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <string>

#include "qelm/error.hpp"

namespace qelm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kDerivedTol = 1e-10;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

template <typename Derived>
using PlainMatrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Kronecker product with the row-major block convention:
/// (A (x) B)(i*rb + k, j*cb + l) = A(i, j) B(k, l).
template <typename DerivedA, typename DerivedB>
PlainMatrix<DerivedA> tensor_product(const Eigen::MatrixBase<DerivedA>& a,
                                     const Eigen::MatrixBase<DerivedB>& b) {
  static_assert(std::is_same_v<typename DerivedA::Scalar, typename DerivedB::Scalar>,
                "tensor_product operands must share a scalar type");
  return Eigen::kroneckerProduct(a.eval(), b.eval()).eval();
}

/// Singular values in descending order.
template <typename Derived>
RealVector singular_values(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return RealVector();
  Eigen::JacobiSVD<PlainMatrix<Derived>> svd(m);
  return svd.singularValues();
}

/// Moore-Penrose pseudoinverse; singular values at or below rcond * sigma_max
/// are treated as zero.
template <typename Derived>
PlainMatrix<Derived> pseudoinverse(const Eigen::MatrixBase<Derived>& m, double rcond = 1e-12) {
  if (!(rcond > 0.0)) throw ContractViolation("pseudoinverse: rcond must be positive");
  using Plain = PlainMatrix<Derived>;
  if (m.size() == 0) return Plain::Zero(m.cols(), m.rows());
  if (!m.allFinite()) throw NumericalError("pseudoinverse: non-finite input");
  Eigen::JacobiSVD<Plain> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const double cutoff = rcond * s(0);
  RealVector inv = RealVector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  }
  Plain out = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
  if (!out.allFinite()) throw NumericalError("pseudoinverse: decomposition produced non-finite values");
  return out;
}

/// Number of singular values strictly above tol * sigma_max.
template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& m, double tol) {
  if (!(tol > 0.0)) throw ContractViolation("numerical_rank: tol must be positive");
  const RealVector s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return (s.array() > tol * s(0)).count();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = kStructuralTol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& m, double tol = kStructuralTol) {
  if (m.rows() != m.cols()) return false;
  const PlainMatrix<Derived> g = m.adjoint() * m;
  return (g - PlainMatrix<Derived>::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

/// Column-stacking vectorization.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> vectorize(const Eigen::MatrixBase<Derived>& m) {
  const PlainMatrix<Derived> plain = m;
  return Eigen::Map<const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>>(plain.data(), plain.size());
}

/// Inverse of vectorize for a dim x dim operator.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> unvectorize(
    const Eigen::MatrixBase<Derived>& v, Index dim) {
  if (v.size() != dim * dim) throw ContractViolation("unvectorize: length is not dim^2");
  const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> plain = v;
  return Eigen::Map<const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>>(
      plain.data(), dim, dim);
}

class Ket;

/// Unit-trace, Hermitian, positive semidefinite matrix. The constructor
/// validates; an instance is always a valid state.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m, double tol = kStructuralTol);
  static DensityMatrix from_ket(const Ket& ket);

  const ComplexMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

/// Unit-norm state vector.
class Ket {
 public:
  explicit Ket(ComplexVector v, double tol = kStructuralTol);
  /// Rescales v to unit norm; throws on a zero vector.
  static Ket normalized(const ComplexVector& v);

  const ComplexVector& amplitudes() const { return v_; }
  Index dim() const { return v_.size(); }
  ComplexMatrix projector() const { return v_ * v_.adjoint(); }

 private:
  ComplexVector v_;
};

/// Empty string when m is a valid density matrix at tolerance tol, otherwise
/// the reason it is not.
std::string density_matrix_defect(const ComplexMatrix& m, double tol = kStructuralTol);

/// Tr(obs rho). Throws ContractViolation for a non-Hermitian observable or a
/// dimension mismatch, NumericalError if the imaginary residue exceeds 1e-10.
double expectation_value(const ComplexMatrix& obs, const DensityMatrix& rho);
double expectation_value(const ComplexMatrix& obs, const ComplexMatrix& rho);

}  // namespace qelm

#endif  // QELM_LINALG_HPP
