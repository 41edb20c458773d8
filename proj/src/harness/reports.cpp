#include "qelm/harness/reports.hpp"

#include <cctype>

namespace qelm::harness {

namespace {

std::string fmt(double v) { return format_double(v); }

std::string label_name(StateLabel l) { return qelm::to_string(l); }

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '+') {
      out += "plus";
    } else if (c == '-') {
      out += "minus";
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      out += c;
    } else {
      out += '_';
    }
  }
  return out;
}

}  // namespace

std::string version_string() {
#ifdef QELM_VERSION
  return QELM_VERSION;
#else
  return "unknown";
#endif
}

Provenance provenance_of(const ExperimentConfig& cfg) { return {cfg.hash(), cfg.seed, version_string()}; }

ArtifactWriter::ArtifactWriter(std::filesystem::path dir, Provenance prov, Json config)
    : dir_(std::move(dir)), prov_(std::move(prov)), config_(std::move(config)) {}

void ArtifactWriter::add_table(const std::string& relpath, const std::string& kind, Table table, const Json& tags) {
  Table t(table.columns());
  t.add_meta("config_hash", prov_.config_hash);
  t.add_meta("seed", std::to_string(prov_.seed));
  t.add_meta("version", prov_.version);
  for (const auto& row : table.rows()) t.add_row(row);
  for (const auto& [k, v] : table.meta()) t.add_meta(k, v);
  add_text(relpath, kind, t.to_csv(), tags);
}

void ArtifactWriter::add_text(const std::string& relpath, const std::string& kind, const std::string& text,
                              const Json& tags) {
  write_text(dir_ / relpath, text);
  Json entry = {{"path", relpath}, {"kind", kind}};
  for (const auto& [k, v] : tags.items()) entry[k] = v;
  files_.push_back(entry);
}

std::filesystem::path ArtifactWriter::finish(const Json& extra) {
  Json manifest = {{"config_hash", prov_.config_hash},
                   {"seed", prov_.seed},
                   {"version", prov_.version},
                   {"config", config_},
                   {"files", files_}};
  for (const auto& [k, v] : extra.items()) manifest[k] = v;
  const auto path = dir_ / "manifest.json";
  write_text(path, manifest.dump(2) + "\n");
  return path;
}

Manifest load_manifest(const std::filesystem::path& dir) {
  const Json j = read_json(dir / "manifest.json");
  Manifest m;
  try {
    m.provenance = {j.at("config_hash").get<std::string>(), j.at("seed").get<std::uint64_t>(),
                    j.at("version").get<std::string>()};
    m.config = j.at("config");
    for (const Json& f : j.at("files")) {
      const std::filesystem::path p = dir / f.at("path").get<std::string>();
      if (!std::filesystem::exists(p)) throw IoError("manifest lists missing file '" + p.string() + "'");
      m.files.push_back(p);
    }
  } catch (const Json::exception& e) {
    throw IoError((dir / "manifest.json").string() + ": malformed manifest (" + e.what() + ")");
  }
  return m;
}

Table scenario_mse_table(const ScenarioResult& r) {
  Table t({"split", "observable", "mse_train", "mse_test"});
  for (const SplitResult& s : r.splits) {
    for (std::size_t j = 0; j < s.eval.observables.size(); ++j) {
      t.add_row({std::to_string(s.index), s.eval.observables[j], fmt(s.trained.report.mse_train(static_cast<Index>(j))),
                 fmt(s.eval.mse_test(static_cast<Index>(j)))});
    }
  }
  return t;
}

Table scenario_summary_table(const ScenarioResult& r) {
  const ScenarioSummary& s = r.summary;
  Table t({"metric", "mean", "std", "repeats"});
  const std::string reps = std::to_string(r.splits.size());
  for (std::size_t j = 0; j < s.observables.size(); ++j) {
    t.add_row({"mse_train:" + s.observables[j], fmt(s.mse_train[j].mean), fmt(s.mse_train[j].std), reps});
    t.add_row({"mse_test:" + s.observables[j], fmt(s.mse_test[j].mean), fmt(s.mse_test[j].std), reps});
  }
  t.add_row({"mse_test:average", fmt(s.mse_test_avg.mean), fmt(s.mse_test_avg.std), reps});
  if (s.accuracy) {
    t.add_row({"witness_accuracy", fmt(s.accuracy->mean), fmt(s.accuracy->std), reps});
    t.add_row({"witness_negative_recall", fmt(s.negative_recall->mean), fmt(s.negative_recall->std), reps});
    t.add_row({"witness_certified_fraction", fmt(s.certified_fraction->mean), fmt(s.certified_fraction->std), reps});
  }
  return t;
}

Table confusion_table(const ScenarioResult& r) {
  Table t({"split", "true_neg_pred_neg", "true_neg_pred_pos", "true_pos_pred_neg", "true_pos_pred_pos", "accuracy",
           "negative_recall", "certified_fraction"});
  for (const SplitResult& s : r.splits) {
    if (!s.eval.confusion) continue;
    const WitnessConfusion& c = *s.eval.confusion;
    t.add_row({std::to_string(s.index), std::to_string(c.table[0][0]), std::to_string(c.table[0][1]),
               std::to_string(c.table[1][0]), std::to_string(c.table[1][1]), fmt(c.accuracy), fmt(c.negative_recall),
               fmt(c.certified_fraction)});
  }
  return t;
}

Table scatter_table(const SplitResult& s, std::size_t observable) {
  Table t({"state", "label", "truth", "prediction"});
  const Index j = static_cast<Index>(observable);
  for (Index k = 0; k < s.eval.predictions.cols(); ++k) {
    t.add_row({std::to_string(k), label_name(s.test_labels.at(static_cast<std::size_t>(k))), fmt(s.eval.truths(j, k)),
               fmt(s.eval.predictions(j, k))});
  }
  return t;
}

Table training_spectrum_table(const ScenarioResult& r) {
  Table t({"split", "index", "singular_value"});
  for (const SplitResult& s : r.splits) {
    const RealVector& sv = s.trained.report.singular_spectrum;
    for (Index i = 0; i < sv.size(); ++i) t.add_row({std::to_string(s.index), std::to_string(i), fmt(sv(i))});
  }
  return t;
}

Table sweep_table(const std::vector<SweepPoint>& sweep) {
  Table t({"n", "mse_mean", "mse_std"});
  for (const SweepPoint& p : sweep) t.add_row({std::to_string(p.n), fmt(p.mse.mean), fmt(p.mse.std)});
  return t;
}

Table noise_table(const std::vector<NoisePoint>& rows) {
  Table t({"p", "mse_mean", "mse_std", "accuracy_mean", "accuracy_std"});
  for (const NoisePoint& p : rows) {
    t.add_row({fmt(p.p), fmt(p.mse.mean), fmt(p.mse.std), fmt(p.accuracy.mean), fmt(p.accuracy.std)});
  }
  return t;
}

Table spectrum_table(const std::vector<SpectrumRow>& rows) {
  Table t({"n", "index", "singular_value", "above_floor_count"});
  for (const SpectrumRow& r : rows) {
    const std::string n = r.n ? std::to_string(*r.n) : "inf";
    for (Index i = 0; i < r.singular_values.size(); ++i) {
      t.add_row({n, std::to_string(i), fmt(r.singular_values(i)), std::to_string(r.above_floor)});
    }
  }
  return t;
}

Table benchmark_table(const std::vector<BenchmarkRow>& rows) {
  Table t({"method", "subset", "mse_mean", "mse_std"});
  t.add_meta("caveat",
             "shadow rows are lower bounds: n_guess is picked per observable with knowledge of the true values");
  for (const BenchmarkRow& r : rows) t.add_row({r.method, r.subset, fmt(r.mse.mean), fmt(r.mse.std)});
  return t;
}

Table throughput_table(const LossModel& loss, const ThroughputEstimate& est) {
  Table t({"quantity", "value"});
  const Json j = loss_to_json(loss);
  for (const auto& [k, v] : j.items()) t.add_row({k, fmt(v.get<double>())});
  t.add_row({"total_hz", fmt(est.total_hz)});
  t.add_row({"per_outcome_hz", fmt(est.per_outcome_hz)});
  return t;
}

Table optimizer_table(const OptimizerResult& r) {
  Table t({"restart", "objective"});
  t.add_meta("best_objective", fmt(r.objective));
  t.add_meta("frame_rank", std::to_string(r.frame_rank));
  t.add_meta("evaluations", std::to_string(r.evaluations));
  for (std::size_t i = 0; i < r.restart_objectives.size(); ++i) {
    t.add_row({std::to_string(i), fmt(r.restart_objectives[i])});
  }
  return t;
}

void write_scenario(ArtifactWriter& out, const ScenarioResult& r) {
  out.add_table("mse_per_split.csv", "mse_table", scenario_mse_table(r));
  out.add_table("summary.csv", "summary", scenario_summary_table(r));
  out.add_table("confusion.csv", "confusion", confusion_table(r));
  out.add_table("training_spectrum.csv", "singular_values", training_spectrum_table(r));
  for (const SplitResult& s : r.splits) {
    for (std::size_t j = 0; j < s.eval.observables.size(); ++j) {
      const std::string name = s.eval.observables[j];
      out.add_table("scatter/" + safe_name(name) + "_split" + std::to_string(s.index) + ".csv", "scatter",
                    scatter_table(s, j), {{"observable", name}, {"split", s.index}});
    }
  }
}

}  // namespace qelm::harness
