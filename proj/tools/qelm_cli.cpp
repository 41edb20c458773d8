// qelm: command-line front end for the simulation and analysis harness.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "qelm/harness/experiment.hpp"
#include "qelm/harness/optimizer.hpp"
#include "qelm/harness/reports.hpp"
#include "qelm/harness/throughput.hpp"

namespace {

using namespace qelm;
using namespace qelm::harness;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "qelm_out";
  std::optional<std::size_t> repeats;
};

ExperimentConfig resolve_config(const Globals& g) {
  ExperimentConfig cfg = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (g.repeats) {
    if (*g.repeats == 0) throw ConfigError("--repeats must be at least 1");
    cfg.repeats = *g.repeats;
  }
  return cfg;
}

ArtifactWriter writer_for(const Globals& g, const ExperimentConfig& cfg) {
  return ArtifactWriter(g.out_dir, provenance_of(cfg), cfg.to_json());
}

template <class T>
std::vector<T> parse_list(const std::string& s, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v;
    if (!(is >> v) || !is.eof()) throw ConfigError(std::string(flag) + ": cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(std::string(flag) + ": empty list");
  return out;
}

std::vector<Observable> parse_targets(const std::string& s) {
  if (s.empty()) return default_targets();
  std::vector<Observable> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(observable_by_name(item));
  return out;
}

/// Statistics for a dataset: from a counts file when given, otherwise exact
/// probabilities under the configured reservoir.
RealMatrix dataset_statistics(const ExperimentConfig& cfg, const Dataset& d, const std::string& counts_path,
                              InputForm form) {
  if (!counts_path.empty()) {
    const CountsMatrix c = load_counts(counts_path);
    if (c.counts.cols() != static_cast<Index>(d.states.size())) {
      throw IoError(counts_path + ": " + std::to_string(c.counts.cols()) + " rows but the dataset has " +
                    std::to_string(d.states.size()) + " states");
    }
    return statistics_matrix(c, form);
  }
  return statistics_matrix(probability_matrix(d.density_matrices(), effective_povm(cfg.reservoir)), form);
}

std::vector<std::string> state_ids(const std::string& prefix, std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < n; ++k) ids.push_back(prefix + std::to_string(k));
  return ids;
}

void print_summary(const ScenarioResult& r) {
  const ScenarioSummary& s = r.summary;
  std::printf("splits: %zu\n", r.splits.size());
  std::printf("mean test MSE (averaged over %zu targets): %.6g +- %.3g\n", s.observables.size(), s.mse_test_avg.mean,
              s.mse_test_avg.std);
  if (s.accuracy) {
    std::printf("witness sign accuracy: %.4f +- %.4f\n", s.accuracy->mean, s.accuracy->std);
    std::printf("certified fraction: %.4f +- %.4f\n", s.certified_fraction->mean, s.certified_fraction->std);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum extreme learning machine simulator and analysis harness", "qelm"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", qelm::harness::version_string());

  Globals g;
  std::uint64_t seed_value = 0;
  std::size_t repeats_value = 0;
  app.add_option("--config", g.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed_value, "Override the config seed");
  auto* repeats_opt = app.add_option("--repeats", repeats_value, "Override the number of repeated splits");
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();

  auto* run = app.add_subcommand("run", "Full scenario: prepare, sample, train and evaluate every split");

  auto* simulate = app.add_subcommand("simulate", "Write one split's datasets and counts");
  std::size_t split_index = 0;
  simulate->add_option("--split", split_index, "Split index")->capture_default_str();

  auto* train_cmd = app.add_subcommand("train", "Train a readout from a dataset and its statistics");
  std::string dataset_path, counts_path, readout_path, input_form_str, targets_str, witness;
  train_cmd->add_option("--dataset", dataset_path, "Dataset JSON")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--counts", counts_path, "Counts CSV (default: exact probabilities)");
  train_cmd->add_option("--input-form", input_form_str, "frequencies | raw_counts | normalized_counts");
  train_cmd->add_option("--targets", targets_str, "Comma-separated observable names");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a trained readout on a dataset");
  evaluate_cmd->add_option("--readout", readout_path, "Readout file")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--dataset", dataset_path, "Dataset JSON")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--counts", counts_path, "Counts CSV (default: exact probabilities)");
  evaluate_cmd->add_option("--witness", witness, "Witness observable for the confusion table");

  auto* sweep_n = app.add_subcommand("sweep-n", "Test MSE against shots per state");
  std::string n_list_str;
  sweep_n->add_option("--n-list", n_list_str, "Comma-separated shot counts");

  auto* sweep_noise = app.add_subcommand("sweep-noise", "Witness MSE and accuracy against mixing probability");
  std::string p_list_str;
  sweep_noise->add_option("--p-list", p_list_str, "Comma-separated p values in [0, 1]");

  auto* optimize = app.add_subcommand("optimize-reservoir", "Minimize Tr(F^+) over waveplate settings");
  OptimizerOptions opt_options;
  optimize->add_option("--budget", opt_options.budget, "Objective evaluations")->capture_default_str();
  optimize->add_option("--restarts", opt_options.restarts, "Random restarts")->capture_default_str();

  auto* svd = app.add_subcommand("svd-report", "Singular values of the training statistics");
  svd->add_option("--n-list", n_list_str, "Comma-separated shot counts");

  auto* bench = app.add_subcommand("benchmark", "Shadow estimation against trained readouts on the same counts");

  auto* tput = app.add_subcommand("throughput", "Coincidence rate from the loss model");
  std::optional<double> eta_qw, eta_proj, eta_slm, eta_smf, cc_source;
  tput->add_option("--eta-qw", eta_qw);
  tput->add_option("--eta-proj", eta_proj);
  tput->add_option("--eta-slm", eta_slm);
  tput->add_option("--eta-smf", eta_smf);
  tput->add_option("--cc-source", cc_source, "Source coincidence rate in Hz");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (*seed_opt) g.seed = seed_value;
  if (*repeats_opt) g.repeats = repeats_value;

  try {
    ExperimentConfig cfg = resolve_config(g);

    if (*run) {
      const ScenarioResult r = run_scenario(cfg);
      ArtifactWriter out = writer_for(g, cfg);
      write_scenario(out, r);
      out.finish();
      print_summary(r);
    } else if (*simulate) {
      const PreparedSplit s = prepare_split(cfg, effective_povm(cfg.reservoir), split_index);
      ArtifactWriter out = writer_for(g, cfg);
      out.add_text("train_dataset.json", "dataset", dataset_to_json(s.train).dump(1) + "\n", {{"split", split_index}});
      out.add_text("test_dataset.json", "dataset", dataset_to_json(s.test).dump(1) + "\n", {{"split", split_index}});
      if (s.train_data.counts) {
        out.add_text("train_counts.csv", "counts",
                     counts_to_csv(*s.train_data.counts, state_ids("train", s.train.states.size())),
                     {{"split", split_index}});
        out.add_text("test_counts.csv", "counts",
                     counts_to_csv(*s.test_data.counts, state_ids("test", s.test.states.size())),
                     {{"split", split_index}});
      }
      out.finish();
      std::printf("wrote split %zu: %zu training and %zu test states\n", split_index, s.train.states.size(),
                  s.test.states.size());
    } else if (*train_cmd) {
      const InputForm form = input_form_str.empty() ? cfg.input_form : input_form_from_string(input_form_str);
      const std::vector<Observable> targets = targets_str.empty() ? cfg.targets : parse_targets(targets_str);
      const Dataset d = load_dataset(dataset_path);
      TrainOptions opts;
      opts.method = cfg.method;
      opts.input_form = form;
      std::vector<std::string> names;
      for (const auto& o : targets) names.push_back(o.name);
      const TrainResult tr = train(dataset_statistics(cfg, d, counts_path, form), truth_matrix(targets, d), names, opts);
      ArtifactWriter out = writer_for(g, cfg);
      out.add_text("readout.txt", "readout", readout_to_text(tr.readout));
      Table report({"observable", "mse_train"});
      for (std::size_t j = 0; j < names.size(); ++j) {
        report.add_row({names[j], format_double(tr.report.mse_train(static_cast<Index>(j)))});
      }
      report.add_meta("effective_rank", std::to_string(tr.report.effective_rank));
      out.add_table("train_report.csv", "mse_table", report);
      Table spectrum({"index", "singular_value"});
      for (Index i = 0; i < tr.report.singular_spectrum.size(); ++i) {
        spectrum.add_row({std::to_string(i), format_double(tr.report.singular_spectrum(i))});
      }
      out.add_table("train_spectrum.csv", "singular_values", spectrum);
      out.finish();
      std::printf("trained %zu observables on %zu states (effective rank %ld)\n", names.size(), d.states.size(),
                  static_cast<long>(tr.report.effective_rank));
    } else if (*evaluate_cmd) {
      const ReadoutMatrix w = readout_from_text(read_text(readout_path));
      std::vector<Observable> targets;
      for (const auto& name : w.observables) targets.push_back(observable_by_name(name));
      const Dataset d = load_dataset(dataset_path);
      TrainReport none;
      none.mse_train = RealVector::Zero(static_cast<Index>(targets.size()));
      const EvalReport r = evaluate(w, none, dataset_statistics(cfg, d, counts_path, w.trained_on),
                                    truth_matrix(targets, d), w.trained_on,
                                    witness.empty() ? std::nullopt : std::optional<std::string>(witness));
      ArtifactWriter out = writer_for(g, cfg);
      Table t({"observable", "mse_test"});
      for (std::size_t j = 0; j < r.observables.size(); ++j) {
        t.add_row({r.observables[j], format_double(r.mse_test(static_cast<Index>(j)))});
      }
      out.add_table("eval.csv", "mse_table", t);
      for (std::size_t j = 0; j < r.observables.size(); ++j) {
        Table s({"state", "label", "truth", "prediction"});
        for (Index k = 0; k < r.predictions.cols(); ++k) {
          s.add_row({std::to_string(k), to_string(d.states[static_cast<std::size_t>(k)].label),
                     format_double(r.truths(static_cast<Index>(j), k)),
                     format_double(r.predictions(static_cast<Index>(j), k))});
        }
        out.add_table("scatter/" + std::to_string(j) + ".csv", "scatter", s, {{"observable", r.observables[j]}});
      }
      if (r.confusion) {
        std::printf("witness %s sign accuracy: %.4f\n", witness.c_str(), r.confusion->accuracy);
      }
      out.finish();
      std::printf("mean test MSE: %.6g\n", r.mse_test.mean());
    } else if (*sweep_n) {
      const auto n_list = n_list_str.empty() ? cfg.n_list : parse_list<std::int64_t>(n_list_str, "--n-list");
      const auto sweep = sweep_statistics(cfg, n_list);
      ArtifactWriter out = writer_for(g, cfg);
      Table t = sweep_table(sweep);
      if (sweep.size() >= 2) {
        std::vector<double> x, y;
        for (const auto& p : sweep) {
          x.push_back(static_cast<double>(p.n));
          y.push_back(p.mse.mean);
        }
        t.add_meta("loglog_slope", format_double(loglog_slope(x, y)));
      }
      t.add_meta("averaged_over", std::to_string(cfg.targets.size()) + " targets");
      out.add_table("sweep_n.csv", "sweep", t);
      out.finish();
      for (const auto& p : sweep) std::printf("N=%lld mse=%.6g +- %.3g\n", static_cast<long long>(p.n), p.mse.mean, p.mse.std);
    } else if (*sweep_noise) {
      const auto p_list = p_list_str.empty() ? cfg.p_list : parse_list<double>(p_list_str, "--p-list");
      const auto rows = noise_sweep(cfg, p_list);
      ArtifactWriter out = writer_for(g, cfg);
      out.add_table("sweep_noise.csv", "sweep", noise_table(rows));
      out.finish();
      for (const auto& r : rows) std::printf("p=%.3f mse=%.6g accuracy=%.4f\n", r.p, r.mse.mean, r.accuracy.mean);
    } else if (*optimize) {
      opt_options.seed = cfg.seed;
      const OptimizerResult r = optimize_reservoir(cfg.reservoir, opt_options);
      ArtifactWriter out = writer_for(g, cfg);
      out.add_text("reservoir.json", "reservoir", reservoir_to_json(r.best).dump(2) + "\n");
      out.add_table("optimizer.csv", "optimizer", optimizer_table(r));
      out.finish({{"objective", r.objective}});
      std::printf("best Tr(F^+) = %.10g (frame rank %ld, %zu evaluations)\n", r.objective,
                  static_cast<long>(r.frame_rank), r.evaluations);
    } else if (*svd) {
      const auto n_list = n_list_str.empty() ? cfg.n_list : parse_list<std::int64_t>(n_list_str, "--n-list");
      const auto rows = singular_value_report(cfg, n_list);
      ArtifactWriter out = writer_for(g, cfg);
      out.add_table("singular_values.csv", "singular_values", spectrum_table(rows));
      out.finish();
      for (const auto& r : rows) {
        std::printf("N=%s: %ld values above floor\n", r.n ? std::to_string(*r.n).c_str() : "inf",
                    static_cast<long>(r.above_floor));
      }
    } else if (*bench) {
      const auto rows = benchmark_shadow_vs_qelm(cfg);
      ArtifactWriter out = writer_for(g, cfg);
      out.add_table("benchmark.csv", "benchmark", benchmark_table(rows));
      out.finish();
      for (const auto& r : rows) {
        std::printf("%-24s %-10s %.6g +- %.3g\n", r.method.c_str(), r.subset.c_str(), r.mse.mean, r.mse.std);
      }
      std::printf("note: shadow values are lower bounds (best-case n_guess per observable)\n");
    } else if (*tput) {
      LossModel loss = cfg.loss;
      if (eta_qw) loss.eta_qw = *eta_qw;
      if (eta_proj) loss.eta_proj = *eta_proj;
      if (eta_slm) loss.eta_slm = *eta_slm;
      if (eta_smf) loss.eta_smf = *eta_smf;
      if (cc_source) loss.cc_source = *cc_source;
      const ThroughputEstimate t = throughput_estimate(loss);
      ArtifactWriter out = writer_for(g, cfg);
      out.add_table("throughput.csv", "throughput", throughput_table(loss, t));
      out.finish();
      std::printf("total coincidence rate: %.4f Hz\nper outcome: %.4f Hz\n", t.total_hz, t.per_outcome_hz);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qelm: %s\n", e.what());
    return exit_code_for(e);
  }
  return 0;
}
