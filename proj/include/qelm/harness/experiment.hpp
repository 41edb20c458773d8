// Scenario configuration and the prepare -> evolve -> sample -> train ->
// evaluate pipeline, plus the sweeps built on top of it.
#ifndef QELM_HARNESS_EXPERIMENT_HPP
#define QELM_HARNESS_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qelm/harness/throughput.hpp"
#include "qelm/io.hpp"
#include "qelm/readout.hpp"
#include "qelm/sampling.hpp"
#include "qelm/shadow.hpp"
#include "qelm/state_prep.hpp"

namespace qelm::harness {

struct SplitSizes {
  std::size_t n_sep = 100;
  std::size_t n_ent = 100;
  std::size_t n_partial = 0;
};

struct Composition {
  enum class Kind { Mixed, SeparableOnly, PlusKEntangled };
  Kind kind = Kind::Mixed;
  std::size_t k = 0;  // entangled training states for PlusKEntangled

  /// Entangled training states actually used for a requested n_ent.
  std::size_t entangled_count(std::size_t n_ent) const;
};

std::string to_string(const Composition& c);

struct ExperimentConfig {
  std::string reservoir_source = "default";  // file path as given, or "inline"/"default"
  ReservoirConfig reservoir;
  ReferenceState ref_sep = reference_state(ReferenceTag::VH);
  ReferenceState ref_ent = reference_state(ReferenceTag::PsiPlus);
  std::optional<ReferenceState> ref_partial;
  SplitSizes train;
  SplitSizes test;
  PrepMode mode = PrepMode::SameAngles;
  std::optional<std::int64_t> shots = kExperimentalShots;  // unset: exact probabilities
  std::uint64_t seed = 1;
  std::vector<Observable> targets = default_targets();
  std::string witness = "W_Phi+";
  Composition composition;
  std::size_t repeats = 20;
  InputForm input_form = InputForm::NormalizedCounts;
  TrainMethod method = TrainMethod::pinv();
  SamplingOptions sampling;
  LossModel loss;
  std::vector<std::int64_t> n_list{10000, 30000, 100000, 300000, 1000000};
  std::vector<double> p_list;  // empty: 21-point grid on [0, 1]

  std::vector<std::string> target_names() const;
  /// Resolved config (reservoir inlined). Stable key order.
  Json to_json() const;
  /// 16 hex digits of FNV-1a over to_json().dump().
  std::string hash() const;
};

/// Paths inside the config (reservoir, observables registry) resolve against
/// base_dir. Unknown keys and bad values throw ConfigError naming the key.
ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {},
                                  const std::string& context = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Tr(O rho) against each state's truth reference, so mislabeled states keep
/// their declared values.
RealMatrix truth_matrix(const std::vector<Observable>& obs, const Dataset& d);

struct PreparedSplit {
  Dataset train;
  Dataset test;
  MeasurementData train_data;
  MeasurementData test_data;
};

/// Split r: train states from stream (seed, r, 0), test from (seed, r, 1),
/// their counts from (seed, r, 2) and (seed, r, 3).
PreparedSplit prepare_split(const ExperimentConfig& cfg, const EffectivePovm& povm, std::size_t r);

struct SplitResult {
  std::size_t index = 0;
  TrainResult trained;
  EvalReport eval;
  std::vector<StateLabel> test_labels;
};

SplitResult run_split(const ExperimentConfig& cfg, const PreparedSplit& split, std::size_t r);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
};

MeanStd mean_std(const std::vector<double>& v);

struct ScenarioSummary {
  std::vector<std::string> observables;
  std::vector<MeanStd> mse_train;  // per observable
  std::vector<MeanStd> mse_test;
  MeanStd mse_test_avg;            // averaged over observables, then over splits
  std::optional<MeanStd> accuracy;
  std::optional<MeanStd> negative_recall;
  std::optional<MeanStd> certified_fraction;
};

struct ScenarioResult {
  std::vector<SplitResult> splits;
  ScenarioSummary summary;
};

ScenarioResult run_scenario(const ExperimentConfig& cfg);

struct SweepPoint {
  std::int64_t n = 0;
  MeanStd mse;  // test MSE averaged over the targets, statistics over repeats
};

/// One row per N: each repeat draws fresh datasets and counts at N shots
/// per state for both training and testing.
std::vector<SweepPoint> sweep_statistics(const ExperimentConfig& cfg, const std::vector<std::int64_t>& n_list);

struct NoisePoint {
  double p = 0.0;
  MeanStd mse;       // of the witness against maximally entangled truths
  MeanStd accuracy;  // witness sign accuracy
};

/// Trains as run_scenario, then replaces each entangled test distribution by
/// (1 - p) p_ent + p p_sep, where p_sep comes from the separable reference
/// under the same preparation angles. Truths stay those of the entangled state.
std::vector<NoisePoint> noise_sweep(const ExperimentConfig& cfg, const std::vector<double>& p_list);

struct SpectrumRow {
  std::optional<std::int64_t> n;  // unset: exact probabilities
  RealVector singular_values;
  Index above_floor = 0;          // values above 1e-10 relative to the largest
};

/// Spectra of the first split's training frequency matrix: exact first, then
/// one row per N.
std::vector<SpectrumRow> singular_value_report(const ExperimentConfig& cfg, const std::vector<std::int64_t>& n_list);

struct BenchmarkRow {
  std::string method;  // shadow_min_over_n, qelm_separable_trained, qelm_mixed_trained
  std::string subset;  // all, separable, entangled
  MeanStd mse;         // averaged over targets, statistics over repeats
};

/// Same test counts for every method. Shadow values use the best n_guess per
/// observable and are therefore lower bounds.
std::vector<BenchmarkRow> benchmark_shadow_vs_qelm(const ExperimentConfig& cfg);

/// Least-squares slope of log10(y) against log10(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Smallest grid N whose MSE lies within `factor` of the beta / N line fitted
/// through the last `fit_points` sweep points.
std::int64_t regime_entry_n(const std::vector<SweepPoint>& sweep, std::size_t fit_points = 2, double factor = 1.5);

}  // namespace qelm::harness

#endif  // QELM_HARNESS_EXPERIMENT_HPP
