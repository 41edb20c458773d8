// File formats: reservoir configs and datasets as JSON, counts and readouts as
// comma-separated tables, observable registries as JSON.
#ifndef QELM_IO_HPP
#define QELM_IO_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qelm/observables.hpp"
#include "qelm/readout.hpp"
#include "qelm/reservoir.hpp"
#include "qelm/sampling.hpp"
#include "qelm/state_prep.hpp"
#include "qelm/waveplates.hpp"

namespace qelm {

using Json = nlohmann::json;

/// Round-trip-exact decimal rendering of a double.
std::string format_double(double v);

Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Reservoir config. Angles are degrees on disk:
// {"walk_a": {"zeta", "theta", "phi", "alpha1", "alpha2"}, "walk_b": {...},
//  "projection_a": {"theta_p", "phi_p"}, "projection_b": {...},
//  "oam_internal_halfwidth": 4}
Json reservoir_to_json(const ReservoirConfig& cfg);
ReservoirConfig reservoir_from_json(const Json& j, const std::string& context = "reservoir");
ReservoirConfig load_reservoir(const std::filesystem::path& path);
void save_reservoir(const ReservoirConfig& cfg, const std::filesystem::path& path);

/// (theta_p, phi_p) with |eta> = cos(theta_p)|H> + e^{i phi_p} sin(theta_p)|V>,
/// global phase removed.
std::pair<double, double> polarization_angles(const Ket& eta);

/// {"tag": "VH"} or {"tag": "custom", "ket": [[re, im] x 4], "entangled": bool}.
Json reference_to_json(const ReferenceState& r);
ReferenceState reference_from_json(const Json& j, const std::string& context);

Json dataset_to_json(const Dataset& d);
Dataset dataset_from_json(const Json& j);
void save_dataset(const Dataset& d, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

/// Header: state_id,shots,c0..c24 (outcome index b = 5 (n1 + 2) + (n2 + 2)).
std::string counts_to_csv(const CountsMatrix& counts, const std::vector<std::string>& state_ids = {});
/// Throws IoError describing every schema deviation (header, field counts,
/// negative or non-integer counts, counts above shots).
CountsMatrix counts_from_csv(const std::string& text, std::vector<std::string>* state_ids = nullptr);
void save_counts(const CountsMatrix& counts, const std::filesystem::path& path,
                 const std::vector<std::string>& state_ids = {});
CountsMatrix load_counts(const std::filesystem::path& path, std::vector<std::string>* state_ids = nullptr);

std::string readout_to_text(const ReadoutMatrix& w);
ReadoutMatrix readout_from_text(const std::string& text);

/// {"name": [[re, im] x 16 row-major], ...}
Json observables_to_json(const std::vector<Observable>& obs);
std::vector<Observable> observables_from_json(const Json& j);

/// Comma-separated table with optional "# key=value" header lines.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
  void add_row(std::vector<std::string> cells);
  std::string to_csv() const;
  void save(const std::filesystem::path& path) const;

  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::pair<std::string, std::string>>& meta() const { return meta_; }

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace qelm

#endif  // QELM_IO_HPP
