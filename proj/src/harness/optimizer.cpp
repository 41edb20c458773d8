#include "qelm/harness/optimizer.hpp"

#include <cmath>
#include <limits>

#include "qelm/harness/parallel.hpp"
#include "qelm/io.hpp"
#include "qelm/nelder_mead.hpp"
#include "qelm/rng.hpp"
#include "qelm/shadow.hpp"
#include "qelm/waveplates.hpp"

namespace qelm::harness {

std::vector<double> reservoir_parameters(const ReservoirConfig& cfg) {
  const auto [tpa, ppa] = polarization_angles(cfg.projection_a);
  const auto [tpb, ppb] = polarization_angles(cfg.projection_b);
  return {cfg.walk_a.coin.zeta, cfg.walk_a.coin.theta, cfg.walk_a.coin.phi,
          cfg.walk_b.coin.zeta, cfg.walk_b.coin.theta, cfg.walk_b.coin.phi,
          tpa, ppa, tpb, ppb};
}

ReservoirConfig reservoir_with_parameters(ReservoirConfig base, const std::vector<double>& x) {
  if (x.size() != kReservoirParameters) throw ContractViolation("reservoir_with_parameters: expected 10 values");
  base.walk_a.coin = {x[0], x[1], x[2]};
  base.walk_b.coin = {x[3], x[4], x[5]};
  base.projection_a = polarization_ket(x[6], x[7]);
  base.projection_b = polarization_ket(x[8], x[9]);
  return base;
}

double reservoir_objective(const ReservoirConfig& cfg, double rank_penalty) {
  const FrameSuperoperator f = frame_superoperator(effective_povm(cfg));
  const Index missing = f.matrix.rows() - frame_rank(f);
  return inverse_frame_trace(f) + rank_penalty * static_cast<double>(missing);
}

ReservoirConfig random_reservoir(std::uint64_t seed, const ReservoirConfig& base) {
  Rng rng(seed);
  std::vector<double> x(kReservoirParameters);
  for (std::size_t i = 0; i < 6; ++i) x[i] = kPi * uniform01(rng);
  for (std::size_t i = 6; i < 10; i += 2) {
    // cos(2 theta_p) uniform on [-1, 1] gives the uniform Bloch-sphere measure.
    x[i] = 0.5 * std::acos(1.0 - 2.0 * uniform01(rng));
    x[i + 1] = 2.0 * kPi * uniform01(rng);
  }
  return reservoir_with_parameters(base, x);
}

OptimizerResult optimize_reservoir(const ReservoirConfig& seed_cfg, const OptimizerOptions& options) {
  if (options.budget == 0) throw ConfigError("optimize_reservoir: budget must be positive");
  if (options.restarts == 0) throw ConfigError("optimize_reservoir: restarts must be positive");
  const std::size_t per_restart = std::max<std::size_t>(options.budget / options.restarts, kReservoirParameters + 1);

  auto objective = [&](const Eigen::VectorXd& v) {
    const std::vector<double> x(v.data(), v.data() + v.size());
    try {
      return reservoir_objective(reservoir_with_parameters(seed_cfg, x), options.rank_penalty);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const auto runs = parallel_map(options.restarts, [&](std::size_t r) {
    const ReservoirConfig start =
        r == 0 ? seed_cfg : random_reservoir(derive_seed(options.seed, {static_cast<std::uint64_t>(r)}), seed_cfg);
    const std::vector<double> x0 = reservoir_parameters(start);
    return nelder_mead(objective, Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Index>(x0.size())), 0.3,
                       per_restart);
  });

  OptimizerResult out;
  out.objective = std::numeric_limits<double>::infinity();
  for (const SimplexResult& s : runs) {
    out.evaluations += s.evaluations;
    out.restart_objectives.push_back(s.value);
    if (s.value < out.objective) {
      out.objective = s.value;
      out.best = reservoir_with_parameters(seed_cfg, std::vector<double>(s.x.data(), s.x.data() + s.x.size()));
    }
  }
  if (!std::isfinite(out.objective)) throw NumericalError("optimize_reservoir: no finite objective value found");
  out.frame_rank = frame_rank(frame_superoperator(effective_povm(out.best)));
  return out;
}

}  // namespace qelm::harness
