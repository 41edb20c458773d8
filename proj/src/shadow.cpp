#include "qelm/shadow.hpp"

#include <cmath>
#include <limits>

namespace qelm {

ComplexMatrix FrameSuperoperator::apply(const ComplexMatrix& x) const {
  return unvectorize(matrix * vectorize(x), dim);
}

FrameSuperoperator frame_superoperator(const EffectivePovm& povm) {
  const ComplexMatrix v = povm.vectorized();
  ComplexMatrix f = v * v.adjoint();
  f = 0.5 * (f + f.adjoint());
  return {std::move(f), povm.dim()};
}

Index frame_rank(const FrameSuperoperator& f) { return numerical_rank(f.matrix, kFrameRcond); }

double inverse_frame_trace(const FrameSuperoperator& f, double rcond) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(f.matrix, Eigen::EigenvaluesOnly);
  const RealVector& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  double trace = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > rcond * top && ev(i) > 0.0) trace += 1.0 / ev(i);
  }
  return trace;
}

DualFrame dual_frame(const FrameSuperoperator& f, const EffectivePovm& povm, double rcond) {
  if (povm.dim() != f.dim) throw ContractViolation("dual_frame: POVM and frame dimensions differ");
  const ComplexMatrix f_pinv = pseudoinverse(f.matrix, rcond);
  DualFrame out;
  out.pseudo_inverted = numerical_rank(f.matrix, rcond) < f.matrix.rows();
  out.duals.reserve(static_cast<std::size_t>(povm.size()));
  for (Index b = 0; b < povm.size(); ++b) {
    ComplexMatrix d = unvectorize(f_pinv * vectorize(povm.effect(b)), f.dim);
    out.duals.push_back(0.5 * (d + d.adjoint()));
  }
  return out;
}

RealVector shadow_estimator(const ComplexMatrix& obs, const DualFrame& duals) {
  RealVector o(static_cast<Index>(duals.duals.size()));
  for (std::size_t b = 0; b < duals.duals.size(); ++b) {
    o(static_cast<Index>(b)) = expectation_value(obs, duals.duals[b]);
  }
  return o;
}

double shadow_mse(const CountsMatrix& counts, const RealVector& truths, const RealVector& estimator, double n_guess) {
  if (!(n_guess > 0.0)) throw ContractViolation("shadow_mse: n_guess must be positive");
  if (counts.counts.cols() != truths.size()) throw ContractViolation("shadow_mse: one truth per state required");
  if (counts.counts.rows() != estimator.size()) throw ContractViolation("shadow_mse: estimator length mismatch");
  if (truths.size() == 0) return 0.0;
  const RealVector estimates = counts.counts.cast<double>().transpose() * estimator / n_guess;
  return (estimates - truths).squaredNorm() / static_cast<double>(truths.size());
}

double shadow_mse(const CountsMatrix& counts, const RealVector& truths, const Observable& obs, const DualFrame& duals,
                  double n_guess) {
  return shadow_mse(counts, truths, shadow_estimator(obs.matrix, duals), n_guess);
}

MinMse min_mse_over_n(const CountsMatrix& counts, const RealVector& truths, const RealVector& estimator,
                      const std::vector<double>& n_grid) {
  if (n_grid.empty()) throw ContractViolation("min_mse_over_n: empty grid");
  MinMse out;
  out.curve.resize(static_cast<Index>(n_grid.size()));
  out.mse_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const double m = shadow_mse(counts, truths, estimator, n_grid[i]);
    out.curve(static_cast<Index>(i)) = m;
    if (m < out.mse_min) {
      out.mse_min = m;
      out.n_star = n_grid[i];
    }
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi >= lo) || count == 0) throw ContractViolation("log_grid: invalid range");
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return g;
}

std::vector<double> default_n_grid() { return log_grid(1e2, 1e8, 60); }

}  // namespace qelm
