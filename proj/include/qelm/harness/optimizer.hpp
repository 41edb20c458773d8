// Reservoir search: minimize Tr(F^+) of the effective POVM over the six coin
// angles and the two projection states (ten parameters), q-plate offsets fixed.
#ifndef QELM_HARNESS_OPTIMIZER_HPP
#define QELM_HARNESS_OPTIMIZER_HPP

#include <cstdint>
#include <vector>

#include "qelm/reservoir.hpp"

namespace qelm::harness {

inline constexpr std::size_t kReservoirParameters = 10;

/// [zeta, theta, phi] of walk a, then walk b, then (theta_p, phi_p) of
/// projection a and b.
std::vector<double> reservoir_parameters(const ReservoirConfig& cfg);
ReservoirConfig reservoir_with_parameters(ReservoirConfig base, const std::vector<double>& x);

/// Tr(F^+) plus rank_penalty for every missing frame dimension.
double reservoir_objective(const ReservoirConfig& cfg, double rank_penalty = 1e9);

/// Coin angles uniform on [0, pi), projections uniform on the Bloch sphere;
/// q-plate offsets as in `base`.
ReservoirConfig random_reservoir(std::uint64_t seed, const ReservoirConfig& base = {});

struct OptimizerOptions {
  std::size_t budget = 48000;  // objective evaluations over all restarts
  std::size_t restarts = 32;
  std::uint64_t seed = 1;
  double rank_penalty = 1e9;
};

struct OptimizerResult {
  ReservoirConfig best;
  double objective = 0.0;
  Index frame_rank = 0;
  std::size_t evaluations = 0;
  std::vector<double> restart_objectives;  // best value of each restart
};

/// Nelder-Mead from seed_cfg (restart 0) and from random reservoirs drawn on
/// stream (seed, restart). Throws ConfigError when budget or restarts is zero.
OptimizerResult optimize_reservoir(const ReservoirConfig& seed_cfg, const OptimizerOptions& options);

}  // namespace qelm::harness

#endif  // QELM_HARNESS_OPTIMIZER_HPP
