#include "qelm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qelm {

namespace {

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(context + ": expected a [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json arr = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) arr.push_back(complex_to_json(m(i, j)));
  }
  return arr;
}

ComplexMatrix matrix_from_json(const Json& j, Index dim, const std::string& context) {
  if (!j.is_array() || static_cast<Index>(j.size()) != dim * dim) {
    throw ConfigError(context + ": expected " + std::to_string(dim * dim) + " row-major complex entries");
  }
  ComplexMatrix m(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index k = 0; k < dim; ++k) m(i, k) = complex_from_json(j[static_cast<std::size_t>(i * dim + k)], context);
  }
  return m;
}

double number_at(const Json& j, const char* key, const std::string& context) {
  if (!j.contains(key)) throw ConfigError(context + ": missing key '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(context + ": key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

const Json& object_at(const Json& j, const char* key, const std::string& context) {
  if (!j.contains(key)) throw ConfigError(context + ": missing key '" + key + "'");
  if (!j.at(key).is_object()) throw ConfigError(context + ": key '" + key + "' must be an object");
  return j.at(key);
}

Json walk_to_json(const WalkConfig& w) {
  return {{"zeta", rad2deg(w.coin.zeta)},       {"theta", rad2deg(w.coin.theta)},
          {"phi", rad2deg(w.coin.phi)},         {"alpha1", rad2deg(w.qplate1.alpha)},
          {"alpha2", rad2deg(w.qplate2.alpha)}, {"delta1", rad2deg(w.qplate1.delta)},
          {"delta2", rad2deg(w.qplate2.delta)}};
}

WalkConfig walk_from_json(const Json& j, const std::string& context) {
  WalkConfig w;
  w.coin = {deg2rad(number_at(j, "zeta", context)), deg2rad(number_at(j, "theta", context)),
            deg2rad(number_at(j, "phi", context))};
  w.qplate1.alpha = deg2rad(number_at(j, "alpha1", context));
  w.qplate2.alpha = deg2rad(number_at(j, "alpha2", context));
  if (j.contains("delta1")) w.qplate1.delta = deg2rad(number_at(j, "delta1", context));
  if (j.contains("delta2")) w.qplate2.delta = deg2rad(number_at(j, "delta2", context));
  return w;
}

Json projection_to_json(const Ket& eta) {
  const auto [theta_p, phi_p] = polarization_angles(eta);
  return {{"theta_p", rad2deg(theta_p)}, {"phi_p", rad2deg(phi_p)}};
}

Ket projection_from_json(const Json& j, const std::string& context) {
  return polarization_ket(deg2rad(number_at(j, "theta_p", context)), deg2rad(number_at(j, "phi_p", context)));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_int64(const std::string& s, std::int64_t& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoll(t, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == t.size();
}

std::vector<std::string> counts_header() {
  std::vector<std::string> h{"state_id", "shots"};
  for (Index b = 0; b < kOutcomes; ++b) h.push_back("c" + std::to_string(b));
  return h;
}

}  // namespace

Json reference_to_json(const ReferenceState& r) {
  Json j = {{"tag", to_string(r.tag)}};
  if (r.tag == ReferenceTag::Custom) {
    Json ket = Json::array();
    for (Index i = 0; i < r.ket.dim(); ++i) ket.push_back(complex_to_json(r.ket.amplitudes()(i)));
    j["ket"] = ket;
    j["entangled"] = r.entangled;
  }
  return j;
}

ReferenceState reference_from_json(const Json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("tag")) throw ConfigError(context + ": reference needs a 'tag'");
  const ReferenceTag tag = reference_tag_from_string(j.at("tag").get<std::string>());
  if (tag != ReferenceTag::Custom) return reference_state(tag);
  if (!j.contains("ket") || !j.at("ket").is_array() || j.at("ket").size() != 4) {
    throw ConfigError(context + ": custom reference needs a 4-entry 'ket'");
  }
  ComplexVector v(4);
  for (Index i = 0; i < 4; ++i) v(i) = complex_from_json(j.at("ket")[static_cast<std::size_t>(i)], context);
  return custom_reference(Ket(v, 1e-10), j.value("entangled", false));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON (" + e.what() + ")");
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "'");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::pair<double, double> polarization_angles(const Ket& eta) {
  if (eta.dim() != 2) throw ContractViolation("polarization_angles: expected a polarization ket");
  const Complex a = eta.amplitudes()(0);
  const Complex b = eta.amplitudes()(1);
  const double theta_p = std::atan2(std::abs(b), std::abs(a));
  const double phi_p = std::abs(b) > 0.0 && std::abs(a) > 0.0 ? std::arg(b) - std::arg(a) : 0.0;
  return {theta_p, phi_p};
}

Json reservoir_to_json(const ReservoirConfig& cfg) {
  return {{"walk_a", walk_to_json(cfg.walk_a)},
          {"walk_b", walk_to_json(cfg.walk_b)},
          {"projection_a", projection_to_json(cfg.projection_a)},
          {"projection_b", projection_to_json(cfg.projection_b)},
          {"oam_internal_halfwidth", cfg.oam_internal_halfwidth}};
}

ReservoirConfig reservoir_from_json(const Json& j, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
  ReservoirConfig cfg;
  cfg.walk_a = walk_from_json(object_at(j, "walk_a", context), context + ".walk_a");
  cfg.walk_b = walk_from_json(object_at(j, "walk_b", context), context + ".walk_b");
  cfg.projection_a = projection_from_json(object_at(j, "projection_a", context), context + ".projection_a");
  cfg.projection_b = projection_from_json(object_at(j, "projection_b", context), context + ".projection_b");
  cfg.oam_internal_halfwidth = j.value("oam_internal_halfwidth", kDefaultOamHalfwidth);
  if (cfg.oam_internal_halfwidth < kOutcomeHalfwidth) {
    throw ConfigError(context + ": oam_internal_halfwidth must be at least 2");
  }
  return cfg;
}

ReservoirConfig load_reservoir(const std::filesystem::path& path) {
  return reservoir_from_json(read_json(path), path.string());
}

void save_reservoir(const ReservoirConfig& cfg, const std::filesystem::path& path) {
  write_text(path, reservoir_to_json(cfg).dump(2) + "\n");
}

Json dataset_to_json(const Dataset& d) {
  Json states = Json::array();
  for (const LabeledState& s : d.states) {
    Json values = Json::object();
    for (const auto& [name, v] : s.true_values) values[name] = v;
    states.push_back({{"label", to_string(s.label)},
                      {"reference", reference_to_json(s.reference)},
                      {"truth_reference", reference_to_json(s.truth_reference)},
                      {"angles_deg",
                       {{"phi_a", rad2deg(s.prep.phi_a)},
                        {"theta_a", rad2deg(s.prep.theta_a)},
                        {"phi_b", rad2deg(s.prep.phi_b)},
                        {"theta_b", rad2deg(s.prep.theta_b)}}},
                      {"rho", matrix_to_json(s.rho.matrix())},
                      {"true_values", values}});
  }
  return {{"seed", d.seed}, {"mode", to_string(d.mode)}, {"states", states}};
}

Dataset dataset_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("states") || !j.at("states").is_array()) {
    throw ConfigError("dataset: expected an object with a 'states' array");
  }
  Dataset d;
  d.seed = j.value("seed", std::uint64_t{0});
  d.mode = prep_mode_from_string(j.value("mode", std::string("same_angles")));
  std::size_t k = 0;
  for (const Json& s : j.at("states")) {
    const std::string ctx = "dataset.states[" + std::to_string(k++) + "]";
    const Json& a = object_at(s, "angles_deg", ctx);
    PreparationAngles angles{deg2rad(number_at(a, "phi_a", ctx)), deg2rad(number_at(a, "theta_a", ctx)),
                             deg2rad(number_at(a, "phi_b", ctx)), deg2rad(number_at(a, "theta_b", ctx))};
    const ReferenceState ref = reference_from_json(s.at("reference"), ctx);
    const ReferenceState truth_ref =
        s.contains("truth_reference") ? reference_from_json(s.at("truth_reference"), ctx) : ref;
    DensityMatrix rho(matrix_from_json(s.at("rho"), 4, ctx + ".rho"), 1e-10);
    std::map<std::string, double> values;
    if (s.contains("true_values")) {
      for (const auto& [name, v] : s.at("true_values").items()) values[name] = v.get<double>();
    }
    const StateLabel label = state_label_from_string(s.value("label", to_string(label_for(ref))));
    d.states.push_back({std::move(rho), label, angles, ref, truth_ref, std::move(values)});
  }
  return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  write_text(path, dataset_to_json(d).dump(1) + "\n");
}

Dataset load_dataset(const std::filesystem::path& path) { return dataset_from_json(read_json(path)); }

std::string counts_to_csv(const CountsMatrix& counts, const std::vector<std::string>& state_ids) {
  std::ostringstream os;
  const auto header = counts_header();
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (Index k = 0; k < counts.counts.cols(); ++k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    os << (ks < state_ids.size() ? state_ids[ks] : std::to_string(k)) << "," << counts.shots.at(ks);
    for (Index b = 0; b < counts.counts.rows(); ++b) os << "," << counts.counts(b, k);
    os << "\n";
  }
  return os.str();
}

CountsMatrix counts_from_csv(const std::string& text, std::vector<std::string>* state_ids) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> problems;
  std::vector<std::vector<std::int64_t>> rows;
  std::vector<std::string> ids;
  bool header_seen = false;
  std::size_t lineno = 0;
  const auto expected = counts_header();
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> cells = split(t, ',');
    for (auto& c : cells) c = trim(c);
    if (!header_seen) {
      header_seen = true;
      if (cells != expected) {
        std::ostringstream os;
        os << "line " << lineno << ": header mismatch: expected " << expected.size() << " columns 'state_id,shots,c0..c"
           << kOutcomes - 1 << "', got " << cells.size() << " columns";
        for (std::size_t i = 0; i < std::max(cells.size(), expected.size()); ++i) {
          const std::string got = i < cells.size() ? cells[i] : "<missing>";
          const std::string want = i < expected.size() ? expected[i] : "<none>";
          if (got != want) os << "; column " << i << ": want '" << want << "' got '" << got << "'";
        }
        problems.push_back(os.str());
        break;
      }
      continue;
    }
    if (cells.size() != expected.size()) {
      problems.push_back("line " + std::to_string(lineno) + ": expected " + std::to_string(expected.size()) +
                         " fields, got " + std::to_string(cells.size()));
      continue;
    }
    std::vector<std::int64_t> values(cells.size() - 1);
    bool ok = true;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (!parse_int64(cells[i], values[i - 1]) || values[i - 1] < 0) {
        problems.push_back("line " + std::to_string(lineno) + ": column '" + expected[i] +
                           "' is not a non-negative integer ('" + cells[i] + "')");
        ok = false;
      }
    }
    if (!ok) continue;
    std::int64_t observed = 0;
    for (std::size_t i = 1; i < values.size(); ++i) observed += values[i];
    if (observed > values[0]) {
      problems.push_back("line " + std::to_string(lineno) + ": observed counts " + std::to_string(observed) +
                         " exceed shots " + std::to_string(values[0]));
      continue;
    }
    ids.push_back(cells[0]);
    rows.push_back(std::move(values));
  }
  if (!header_seen) problems.push_back("missing header row");
  if (!problems.empty()) {
    std::string msg = "counts file schema mismatch:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw IoError(msg);
  }
  CountsMatrix out{CountMatrix(kOutcomes, static_cast<Index>(rows.size())), {}};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.shots.push_back(rows[k][0]);
    for (Index b = 0; b < kOutcomes; ++b) {
      out.counts(b, static_cast<Index>(k)) = rows[k][static_cast<std::size_t>(b) + 1];
    }
  }
  if (state_ids != nullptr) *state_ids = std::move(ids);
  return out;
}

void save_counts(const CountsMatrix& counts, const std::filesystem::path& path,
                 const std::vector<std::string>& state_ids) {
  write_text(path, counts_to_csv(counts, state_ids));
}

CountsMatrix load_counts(const std::filesystem::path& path, std::vector<std::string>* state_ids) {
  try {
    return counts_from_csv(read_text(path), state_ids);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string readout_to_text(const ReadoutMatrix& w) {
  std::ostringstream os;
  os << "# qelm-readout v1\n";
  os << "# trained_on=" << to_string(w.trained_on) << "\n";
  os << "# rcond=" << format_double(w.rcond) << "\n";
  os << "# lambda=" << (w.ridge_lambda ? format_double(*w.ridge_lambda) : std::string("none")) << "\n";
  os << "# affine=" << (w.affine ? 1 : 0) << "\n";
  os << "observable";
  for (Index b = 0; b < w.outcomes(); ++b) os << ",w" << b;
  if (w.affine) os << ",bias";
  os << "\n";
  for (Index j = 0; j < w.weights.rows(); ++j) {
    os << w.observables.at(static_cast<std::size_t>(j));
    for (Index b = 0; b < w.weights.cols(); ++b) os << "," << format_double(w.weights(j, b));
    os << "\n";
  }
  return os.str();
}

ReadoutMatrix readout_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  ReadoutMatrix w;
  std::vector<std::vector<double>> rows;
  bool header_seen = false;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(t.substr(1, eq - 1));
      const std::string value = trim(t.substr(eq + 1));
      if (key == "trained_on") w.trained_on = input_form_from_string(value);
      if (key == "rcond") w.rcond = std::stod(value);
      if (key == "lambda" && value != "none") w.ridge_lambda = std::stod(value);
      if (key == "affine") w.affine = value == "1";
      continue;
    }
    const auto cells = split(t, ',');
    if (!header_seen) {
      header_seen = true;
      width = cells.size() - 1;
      continue;
    }
    if (cells.size() != width + 1) throw IoError("readout: row width differs from header");
    w.observables.push_back(trim(cells[0]));
    std::vector<double> values;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      try {
        values.push_back(std::stod(cells[i]));
      } catch (const std::exception&) {
        throw IoError("readout: non-numeric weight '" + cells[i] + "'");
      }
    }
    rows.push_back(std::move(values));
  }
  if (!header_seen) throw IoError("readout: missing header row");
  w.weights.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t b = 0; b < width; ++b) w.weights(static_cast<Index>(j), static_cast<Index>(b)) = rows[j][b];
  }
  return w;
}

Json observables_to_json(const std::vector<Observable>& obs) {
  Json j = Json::object();
  for (const Observable& o : obs) j[o.name] = matrix_to_json(o.matrix);
  return j;
}

std::vector<Observable> observables_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("observable registry: expected an object");
  std::vector<Observable> out;
  for (const auto& [name, entries] : j.items()) {
    out.push_back(make_observable(name, matrix_from_json(entries, 4, "observable '" + name + "'")));
  }
  return out;
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw ContractViolation("table: row width differs from header");
  rows_.push_back(std::move(cells));
}

std::string Table::to_csv() const {
  std::ostringstream os;
  for (const auto& [k, v] : meta_) os << "# " << k << "=" << v << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

void Table::save(const std::filesystem::path& path) const { write_text(path, to_csv()); }

}  // namespace qelm
