// Plot-ready tables and the output-directory manifest. Every file carries a
// "# config_hash / seed / version" header; nothing time-dependent is written.
#ifndef QELM_HARNESS_REPORTS_HPP
#define QELM_HARNESS_REPORTS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "qelm/harness/experiment.hpp"
#include "qelm/harness/optimizer.hpp"
#include "qelm/harness/throughput.hpp"
#include "qelm/io.hpp"

namespace qelm::harness {

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
};

Provenance provenance_of(const ExperimentConfig& cfg);
std::string version_string();

/// Collects files written under one directory and emits manifest.json listing
/// each with its kind and optional observable / split tags.
class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, Provenance prov, Json config);

  void add_table(const std::string& relpath, const std::string& kind, Table table, const Json& tags = Json::object());
  void add_text(const std::string& relpath, const std::string& kind, const std::string& text,
                const Json& tags = Json::object());
  /// Writes manifest.json and returns its path.
  std::filesystem::path finish(const Json& extra = Json::object());

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  Provenance prov_;
  Json config_;
  Json files_ = Json::array();
};

struct Manifest {
  Provenance provenance;
  Json config;
  std::vector<std::filesystem::path> files;
};

/// Loads manifest.json and checks that every listed file exists.
Manifest load_manifest(const std::filesystem::path& dir);

Table scenario_mse_table(const ScenarioResult& r);
Table scenario_summary_table(const ScenarioResult& r);
Table confusion_table(const ScenarioResult& r);
Table scatter_table(const SplitResult& s, std::size_t observable);
Table training_spectrum_table(const ScenarioResult& r);
Table sweep_table(const std::vector<SweepPoint>& sweep);
Table noise_table(const std::vector<NoisePoint>& rows);
Table spectrum_table(const std::vector<SpectrumRow>& rows);
Table benchmark_table(const std::vector<BenchmarkRow>& rows);
Table throughput_table(const LossModel& loss, const ThroughputEstimate& t);
Table optimizer_table(const OptimizerResult& r);

/// Writes the scenario tables and one scatter file per (observable, split).
void write_scenario(ArtifactWriter& out, const ScenarioResult& r);

}  // namespace qelm::harness

#endif  // QELM_HARNESS_REPORTS_HPP
