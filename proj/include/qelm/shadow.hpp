// Dual-frame (shadow) estimation from a known effective POVM.
//
// The frame superoperator F(X) = sum_b Tr(mu_b X) mu_b is represented on
// column-vectorized operators as V V^dagger, V = [vec(mu_1) ... vec(mu_n)].
// Canonical duals are mu*_b = F^+(mu_b), and o(b) = Tr(O mu*_b) is the
// unbiased single-shot estimator of Tr(O rho) whenever the POVM is
// informationally complete.
#ifndef QELM_SHADOW_HPP
#define QELM_SHADOW_HPP

#include <cstdint>
#include <vector>

#include "qelm/linalg.hpp"
#include "qelm/observables.hpp"
#include "qelm/reservoir.hpp"
#include "qelm/sampling.hpp"

namespace qelm {

inline constexpr double kFrameRcond = 1e-10;

struct FrameSuperoperator {
  ComplexMatrix matrix;  // d^2 x d^2
  Index dim = 0;         // d

  ComplexMatrix apply(const ComplexMatrix& x) const;
};

struct DualFrame {
  std::vector<ComplexMatrix> duals;
  bool pseudo_inverted = false;  // F was rank deficient
};

FrameSuperoperator frame_superoperator(const EffectivePovm& povm);

/// Numerical rank of F at relative tolerance kFrameRcond; d^2 means the POVM
/// is informationally complete.
Index frame_rank(const FrameSuperoperator& f);

/// Tr(F^+), the reservoir figure of merit (smaller is better).
double inverse_frame_trace(const FrameSuperoperator& f, double rcond = kFrameRcond);

DualFrame dual_frame(const FrameSuperoperator& f, const EffectivePovm& povm, double rcond = kFrameRcond);

/// o(b) = Tr(O mu*_b) for every outcome.
RealVector shadow_estimator(const ComplexMatrix& obs, const DualFrame& duals);

/// Mean over states of |sum_b o(b) N_b / n_guess - truth|^2.
double shadow_mse(const CountsMatrix& counts, const RealVector& truths, const RealVector& estimator, double n_guess);
double shadow_mse(const CountsMatrix& counts, const RealVector& truths, const Observable& obs, const DualFrame& duals,
                  double n_guess);

struct MinMse {
  double n_star = 0.0;
  double mse_min = 0.0;
  RealVector curve;  // mse at each grid point
};

/// Full scan of n_grid; the minimum is a best case since the true input
/// statistics are not known to the estimator.
MinMse min_mse_over_n(const CountsMatrix& counts, const RealVector& truths, const RealVector& estimator,
                      const std::vector<double>& n_grid);

/// count points log-spaced over [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Default guess grid: 60 points over [1e2, 1e8].
std::vector<double> default_n_grid();

}  // namespace qelm

#endif  // QELM_SHADOW_HPP
