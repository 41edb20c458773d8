// Acceptance suite: one PASS/FAIL line per criterion, with indented details.
// Exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qelm/harness/experiment.hpp"
#include "qelm/harness/optimizer.hpp"
#include "qelm/harness/parallel.hpp"
#include "qelm/harness/reports.hpp"
#include "qelm/harness/throughput.hpp"
#include "qelm/rng.hpp"

namespace {

using namespace qelm;
using namespace qelm::harness;
namespace fs = std::filesystem;

const fs::path kConfigDir = QELM_CONFIG_DIR;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

ComplexMatrix random_density_matrix(Rng& rng) {
  ComplexMatrix g(4, 4);
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 4; ++j) g(i, j) = {standard_normal(rng), standard_normal(rng)};
  }
  ComplexMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

ComplexMatrix random_product_state(Rng& rng) {
  ComplexVector a(2), b(2);
  for (Index i = 0; i < 2; ++i) {
    a(i) = {standard_normal(rng), standard_normal(rng)};
    b(i) = {standard_normal(rng), standard_normal(rng)};
  }
  const ComplexVector psi = tensor_product(a.normalized(), b.normalized());
  return psi * psi.adjoint();
}

/// Config for the exact, full-rank (independent-angle) regime on R1.
ExperimentConfig exact_full_rank_config() {
  ExperimentConfig cfg;
  cfg.reservoir = load_reservoir(kConfigDir / "r1.json");
  cfg.mode = PrepMode::IndependentAngles;
  cfg.shots.reset();
  cfg.input_form = InputForm::Frequencies;
  cfg.targets = registered_observables();
  cfg.train = {100, 100, 0};
  cfg.repeats = 1;
  cfg.seed = 2;
  return cfg;
}

/// 50 prepared states plus 50 random mixed states, none seen in training.
std::vector<ComplexMatrix> held_out_states(std::uint64_t seed) {
  const Dataset d = generate_dataset(reference_state(ReferenceTag::VH), reference_state(ReferenceTag::PsiPlus), 25,
                                     25, PrepMode::IndependentAngles, seed);
  std::vector<ComplexMatrix> states = d.density_matrices();
  Rng rng(derive_seed(seed, {99}));
  for (int k = 0; k < 50; ++k) states.push_back(random_density_matrix(rng));
  return states;
}

Outcome criterion1() {
  Outcome o;
  struct Case {
    const char* name;
    ReferenceTag sep;
    PrepMode mode;
    SpanRanks expected;
  };
  const Case cases[] = {{"VV/same-angle", ReferenceTag::VV, PrepMode::SameAngles, {9, 9, 9}},
                        {"VH/same-angle", ReferenceTag::VH, PrepMode::SameAngles, {9, 6, 10}},
                        {"VH/independent-angle", ReferenceTag::VH, PrepMode::IndependentAngles, {16, 10, 16}}};
  for (const Case& c : cases) {
    const Dataset d = generate_dataset(reference_state(c.sep), reference_state(ReferenceTag::PsiPlus), 150, 150,
                                       c.mode, 11);
    const SpanRanks r = span_ranks(d);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s: expected (%ld,%ld,%ld) got (%ld,%ld,%ld)", c.name, (long)c.expected.sep,
                  (long)c.expected.ent, (long)c.expected.all, (long)r.sep, (long)r.ent, (long)r.all);
    o.check(r.sep == c.expected.sep && r.ent == c.expected.ent && r.all == c.expected.all, buf);
  }
  return o;
}

Outcome criterion2and3(bool shadow_part) {
  Outcome o;
  const ExperimentConfig cfg = exact_full_rank_config();
  const EffectivePovm povm = effective_povm(cfg.reservoir);
  const FrameSuperoperator frame = frame_superoperator(povm);
  o.check(frame_rank(frame) == 16, "reservoir R1 is informationally complete (frame rank 16)");
  const PreparedSplit split = prepare_split(cfg, povm, 0);
  const SpanRanks ranks = span_ranks(split.train);
  o.check(ranks.all == 16, "training span rank " + std::to_string(ranks.all));

  TrainOptions opts;
  opts.input_form = InputForm::Frequencies;
  const TrainResult tr = train(statistics_matrix(split.train_data, InputForm::Frequencies),
                               truth_matrix(cfg.targets, split.train), cfg.target_names(), opts);
  const std::vector<ComplexMatrix> test = held_out_states(777);
  const ProbabilityMatrix p = probability_matrix(test, povm);
  const RealMatrix preds = predict(tr.readout, p.probs, InputForm::Frequencies);
  const RealMatrix truths = expectation_matrix(cfg.targets, test);

  if (!shadow_part) {
    const double err = (preds - truths).cwiseAbs().maxCoeff();
    o.check(err < 1e-9, fmt("max |prediction - truth| over 16 Paulis + 4 witnesses, 100 states = %.3g", err));
  } else {
    const DualFrame duals = dual_frame(frame, povm);
    RealMatrix shadow(preds.rows(), preds.cols());
    for (std::size_t j = 0; j < cfg.targets.size(); ++j) {
      shadow.row(static_cast<Index>(j)) = shadow_estimator(cfg.targets[j].matrix, duals).transpose() * p.probs;
    }
    const double gap = (preds - shadow).cwiseAbs().maxCoeff();
    o.check(gap < 1e-8, fmt("max |trained readout - dual-frame estimate| = %.3g", gap));
    const double w_gap = (tr.readout.weights - [&] {
                           RealMatrix m(preds.rows(), kOutcomes);
                           for (std::size_t j = 0; j < cfg.targets.size(); ++j) {
                             m.row(static_cast<Index>(j)) = shadow_estimator(cfg.targets[j].matrix, duals).transpose();
                           }
                           return m;
                         }())
                             .cwiseAbs()
                             .maxCoeff();
    o.note(fmt("max |W - Tr(O mu*)| entrywise = %.3g", w_gap));
  }
  return o;
}

ExperimentConfig scaling_config(const std::string& reservoir_file) {
  ExperimentConfig cfg;
  cfg.reservoir = load_reservoir(kConfigDir / reservoir_file);
  cfg.ref_sep = reference_state(ReferenceTag::VH);
  cfg.mode = PrepMode::IndependentAngles;
  cfg.composition = {Composition::Kind::SeparableOnly, 0};
  cfg.train = {150, 0, 0};
  cfg.test = {0, 150, 0};
  cfg.input_form = InputForm::Frequencies;
  cfg.repeats = 20;
  cfg.seed = 4;
  return cfg;
}

std::pair<double, double> slopes(const std::vector<SweepPoint>& sweep) {
  std::vector<double> x, y;
  for (const auto& p : sweep) {
    x.push_back(static_cast<double>(p.n));
    y.push_back(p.mse.mean);
  }
  return {loglog_slope(x, y), loglog_slope({x[0], x[1]}, {y[0], y[1]})};
}

Outcome criterion4() {
  Outcome o;
  const std::vector<std::int64_t> grid{10000, 30000, 100000, 300000, 1000000};
  const auto sweep = sweep_statistics(scaling_config("r2.json"), grid);
  for (const auto& p : sweep) o.note(fmt("N=%.0f  mean test MSE %.4g", static_cast<double>(p.n), p.mse.mean));
  const auto [slope, local] = slopes(sweep);
  o.check(slope >= -1.15 && slope <= -0.85, fmt("fitted log-log slope %.4f in [-1.15, -0.85]", slope));
  o.check(local > -1.0, fmt("small-N local slope %.4f > -1 (settling regime)", local));
  const auto [slope1, local1] = slopes(sweep_statistics(scaling_config("r1.json"), grid));
  o.note(fmt("for reference, the optimized reservoir R1: slope %.4f, small-N local slope %.4f", slope1, local1));
  return o;
}

Outcome criterion5() {
  Outcome o;
  ExperimentConfig cfg = exact_full_rank_config();
  cfg.shots = 100000;
  cfg.test = {50, 50, 0};
  cfg.targets = default_targets();
  const EffectivePovm povm = effective_povm(cfg.reservoir);
  const DualFrame duals = dual_frame(frame_superoperator(povm), povm);
  const PreparedSplit split = prepare_split(cfg, povm, 0);
  const RealMatrix truths = truth_matrix(cfg.targets, split.test);
  double worst_rel = 0.0;
  bool min_below = true;
  for (std::size_t j = 0; j < cfg.targets.size(); ++j) {
    const RealVector t = truths.row(static_cast<Index>(j)).transpose();
    const RealVector est = shadow_estimator(cfg.targets[j].matrix, duals);
    const double saturation = t.squaredNorm() / static_cast<double>(t.size());
    const double far = shadow_mse(*split.test_data.counts, t, est, 1e3 * static_cast<double>(*cfg.shots));
    worst_rel = std::max(worst_rel, std::abs(far - saturation) / saturation);
    const MinMse m = min_mse_over_n(*split.test_data.counts, t, est, default_n_grid());
    min_below = min_below && m.mse_min < saturation;
  }
  o.check(worst_rel < 0.05, fmt("n_guess = 1e3 N: worst |MSE - mean(truth^2)| / mean(truth^2) = %.4f", worst_rel));
  o.check(min_below, "minimum over the n_guess grid is below saturation for all 19 targets");
  return o;
}

Outcome criterion6() {
  Outcome o;
  ExperimentConfig cfg = load_config(kConfigDir / "e4_separable_only.json");
  const ScenarioResult r = run_scenario(cfg);
  double worst = 1.0;
  for (const auto& s : r.splits) worst = std::min(worst, s.eval.confusion->accuracy);
  o.check(r.summary.accuracy->mean > 0.90,
          fmt("W_Phi+ sign accuracy on 150 unseen entangled states: mean %.4f over 20 splits (min %.4f)",
              r.summary.accuracy->mean, worst));
  o.note(fmt("certified fraction (pred < -3 sqrt(MSE_train)) %.4f", r.summary.certified_fraction->mean));
  return o;
}

Outcome criterion7() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.reservoir = load_reservoir(kConfigDir / "r1.json");
  cfg.ref_sep = reference_state(ReferenceTag::VH);
  cfg.mode = PrepMode::SameAngles;
  cfg.shots.reset();
  cfg.input_form = InputForm::Frequencies;
  cfg.train = {150, 150, 0};
  cfg.test = {0, 150, 0};
  cfg.repeats = 1;
  cfg.seed = 7;
  cfg.composition = {Composition::Kind::SeparableOnly, 0};
  const Index w = 15;  // W_Phi+ in default_targets()

  auto residuals = [&](const ExperimentConfig& c) {
    const ScenarioResult r = run_scenario(c);
    const SplitResult& s = r.splits.front();
    const RealVector res = (s.eval.predictions.row(w) - s.eval.truths.row(w)).transpose();
    const double mean = res.mean();
    const double sd = std::sqrt((res.array() - mean).square().sum() / static_cast<double>(res.size() - 1));
    return std::pair{mean, sd};
  };
  const auto [offset, sd] = residuals(cfg);
  o.check(sd < 0.02 && std::abs(offset) > 1e-3,
          fmt("separable-only: residual offset %.6f, std %.3g", offset, sd));
  cfg.composition = {Composition::Kind::PlusKEntangled, 1};
  const auto [offset1, sd1] = residuals(cfg);
  o.check(std::abs(offset1) < 1e-6, fmt("plus one entangled state: offset %.3g (std %.3g)", offset1, sd1));
  return o;
}

Outcome criterion8() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.reservoir = load_reservoir(kConfigDir / "r2.json");
  cfg.ref_sep = reference_state(ReferenceTag::VH);
  cfg.mode = PrepMode::SameAngles;
  cfg.train = {75, 75, 0};
  cfg.test = {0, 150, 0};
  cfg.input_form = InputForm::Frequencies;
  cfg.seed = 8;
  cfg.repeats = 20;

  // Linearity on exact endpoint distributions.
  {
    ExperimentConfig exact = cfg;
    exact.shots.reset();
    const EffectivePovm povm = effective_povm(exact.reservoir);
    const PreparedSplit split = prepare_split(exact, povm, 0);
    const SplitResult trained = run_split(exact, split, 0);
    const Dataset ent = generate_dataset(exact.ref_sep, exact.ref_ent, 0, 150, exact.mode, 81);
    const Dataset sep = generate_dataset(exact.ref_sep, exact.ref_ent, 150, 0, exact.mode, 81);
    const ProbabilityMatrix pe = probability_matrix(ent.density_matrices(), povm);
    const ProbabilityMatrix ps = probability_matrix(sep.density_matrices(), povm);
    const RealMatrix pred_e = predict(trained.trained.readout, pe.probs, InputForm::Frequencies);
    const RealMatrix pred_s = predict(trained.trained.readout, ps.probs, InputForm::Frequencies);
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double p = i / 20.0;
      RealMatrix mixed(kOutcomes, 150);
      for (Index k = 0; k < 150; ++k) mixed.col(k) = mix_distributions(column(pe, k), column(ps, k), p).probs;
      const RealMatrix pred = predict(trained.trained.readout, mixed, InputForm::Frequencies);
      worst = std::max(worst, (pred - ((1.0 - p) * pred_e + p * pred_s)).cwiseAbs().maxCoeff());
    }
    o.check(worst < 1e-12, fmt("max |pred(mix) - convex combination| over 21 p values = %.3g", worst));
  }

  cfg.shots = kExperimentalShots;
  const auto rows = noise_sweep(cfg, {});
  bool ok = true;
  for (const auto& r : rows) {
    if (r.p <= 0.5 + 1e-12) {
      ok = ok && r.accuracy.mean > 0.5;
      o.note(fmt("p=%.2f  sign accuracy %.4f", r.p, r.accuracy.mean));
    }
  }
  o.check(ok, "accuracy > 0.5 for p <= 0.5 at 1117 shots per state");
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::vector<WitnessSpec> specs;
  for (int i = 1; i <= 4; ++i) specs.push_back(bell_witness(i));
  specs.push_back(general_witness(reference_state(ReferenceTag::PsiPlusP1).ket, "W_P1"));
  specs.push_back(general_witness(reference_state(ReferenceTag::PsiPlusP2).ket, "W_P2"));
  Rng rng(9);
  std::vector<ComplexMatrix> products;
  for (int k = 0; k < 100000; ++k) products.push_back(random_product_state(rng));
  for (const WitnessSpec& w : specs) {
    double lo = 1e9;
    for (const auto& rho : products) lo = std::min(lo, expectation_value(w.observable.matrix, rho));
    const double on_target = expectation_value(w.observable.matrix, w.target.projector());
    o.check(lo >= -1e-9 && std::abs(on_target - (w.alpha - 1.0)) < 1e-12,
            w.observable.name + fmt(": min over 1e5 product states %.3g, on target %.15g", lo, on_target) +
                fmt(" (alpha - 1 = %.15g)", w.alpha - 1.0));
  }
  return o;
}

Outcome criterion10() {
  Outcome o;
  OptimizerOptions opts;
  opts.seed = 2024;
  const OptimizerResult best = optimize_reservoir(ReservoirConfig{}, opts);
  int beaten = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    if (best.objective < reservoir_objective(random_reservoir(derive_seed(10, {i})))) ++beaten;
  }
  o.check(beaten >= 95, fmt("optimized Tr(F^+) = %.6g is below %.0f of 100 random configs", best.objective, beaten));
  const double stored = reservoir_objective(load_reservoir(kConfigDir / "r1.json"));
  o.note(fmt("shipped R1 objective %.10g, rerun objective %.10g", stored, best.objective));

  const std::vector<std::int64_t> grid{1000, 3000, 10000, 30000, 100000, 300000, 1000000};
  ExperimentConfig opt_cfg = scaling_config("r1.json");
  opt_cfg.reservoir = best.best;
  const auto opt_sweep = sweep_statistics(opt_cfg, grid);
  const auto rnd_sweep = sweep_statistics(scaling_config("r3.json"), grid);
  const auto n_opt = regime_entry_n(opt_sweep);
  const auto n_rnd = regime_entry_n(rnd_sweep);
  o.check(n_opt <= n_rnd, fmt("1/N regime entry: optimized N=%.0f, random baseline (R3) N=%.0f",
                              static_cast<double>(n_opt), static_cast<double>(n_rnd)));
  return o;
}

Outcome criterion11() {
  Outcome o;
  const ThroughputEstimate t = throughput_estimate(LossModel{});
  o.check(std::abs(t.per_outcome_hz - 6.1) < 0.1,
          fmt("per-outcome rate %.4f Hz (total over 25 outcomes %.4f Hz)", t.per_outcome_hz, t.total_hz));
  return o;
}

Outcome criterion12() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / "qelm_acceptance_determinism";
  fs::remove_all(base);
  const char* saved = std::getenv(kWorkersEnv);
  const std::string saved_value = saved ? saved : "";
  auto run_into = [&](const fs::path& dir, const char* workers) {
    setenv(kWorkersEnv, workers, 1);
    ExperimentConfig cfg = load_config(kConfigDir / "e2.json");
    cfg.repeats = 4;
    ArtifactWriter out(dir, provenance_of(cfg), cfg.to_json());
    write_scenario(out, run_scenario(cfg));
    out.add_table("sweep_n.csv", "sweep", sweep_table(sweep_statistics(cfg, {1000, 10000})));
    out.finish();
  };
  run_into(base / "a", "1");
  run_into(base / "b", "3");
  if (saved) {
    setenv(kWorkersEnv, saved_value.c_str(), 1);
  } else {
    unsetenv(kWorkersEnv);
  }
  const Manifest ma = load_manifest(base / "a");
  std::size_t identical = 0;
  for (const auto& f : ma.files) {
    const fs::path other = base / "b" / fs::relative(f, base / "a");
    if (fs::exists(other) && read_text(f) == read_text(other)) ++identical;
  }
  const bool manifests_equal = read_text(base / "a" / "manifest.json") == read_text(base / "b" / "manifest.json");
  o.check(identical == ma.files.size() && manifests_equal,
          std::to_string(identical) + " of " + std::to_string(ma.files.size()) +
              " artifact files byte-identical across reruns (1 vs 3 workers), manifest identical");
  fs::remove_all(base);
  return o;
}

struct Criterion {
  const char* id;
  const char* title;
  double budget_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"C1", "structural span ranks", 10, criterion1},
      {"C2", "exact-inversion identity", 5, [] { return criterion2and3(false); }},
      {"C3", "readout / dual-frame equivalence", 5, [] { return criterion2and3(true); }},
      {"C4", "1/N scaling of test MSE", 120, criterion4},
      {"C5", "shadow MSE saturation", 30, criterion5},
      {"C6", "separable-only generalization", 60, criterion6},
      {"C7", "constant-bias signature and repair", 30, criterion7},
      {"C8", "noise linearity and robustness", 60, criterion8},
      {"C9", "witness validity", 30, criterion9},
      {"C10", "reservoir optimizer ordering", 600, criterion10},
      {"C11", "throughput formula", 0, criterion11},
      {"C12", "determinism", 0, criterion12},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0) o.check(secs < c.budget_s, fmt("runtime %.2f s < %.0f s", secs, c.budget_s));
    std::printf("%s %s %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
