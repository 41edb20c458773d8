#include "qelm/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "qelm/harness/parallel.hpp"
#include "qelm/rng.hpp"

namespace qelm::harness {

namespace {

const std::set<std::string> kConfigKeys = {
    "reservoir", "references", "train",  "test",     "mode",     "shots",  "seed",   "targets", "observables",
    "witness",   "composition", "repeats", "input_form", "method", "sampling", "loss", "n_list",  "p_list"};

std::size_t count_at(const Json& j, const char* key, std::size_t fallback, const std::string& context) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(context + ": key '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

SplitSizes sizes_from_json(const Json& j, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
  for (const auto& [key, v] : j.items()) {
    if (key != "n_sep" && key != "n_ent" && key != "n_partial") {
      throw ConfigError(context + ": unknown key '" + key + "'");
    }
  }
  SplitSizes s;
  s.n_sep = count_at(j, "n_sep", s.n_sep, context);
  s.n_ent = count_at(j, "n_ent", s.n_ent, context);
  s.n_partial = count_at(j, "n_partial", s.n_partial, context);
  return s;
}

Json sizes_to_json(const SplitSizes& s) {
  return {{"n_sep", s.n_sep}, {"n_ent", s.n_ent}, {"n_partial", s.n_partial}};
}

ReferenceState reference_entry(const Json& j, const std::string& context) {
  if (j.is_string()) return reference_state(reference_tag_from_string(j.get<std::string>()));
  return reference_from_json(j, context);
}

Composition composition_from_json(const Json& j, const std::string& context) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "mixed") return {Composition::Kind::Mixed, 0};
    if (s == "separable_only") return {Composition::Kind::SeparableOnly, 0};
    throw ConfigError(context + ": unknown composition '" + s + "'");
  }
  if (j.is_object() && j.size() == 1 && j.contains("plus_k_entangled")) {
    return {Composition::Kind::PlusKEntangled, count_at(j, "plus_k_entangled", 0, context)};
  }
  throw ConfigError(context + ": composition must be \"mixed\", \"separable_only\" or {\"plus_k_entangled\": k}");
}

Json composition_to_json(const Composition& c) {
  if (c.kind == Composition::Kind::PlusKEntangled) return {{"plus_k_entangled", c.k}};
  return to_string(c);
}

TrainMethod method_from_json(const Json& j, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
  const std::string kind = j.value("kind", std::string("pinv"));
  if (kind == "pinv") {
    const double rcond = j.value("rcond", 1e-12);
    if (!(rcond > 0.0)) throw ConfigError(context + ": rcond must be positive");
    return TrainMethod::pinv(rcond);
  }
  if (kind == "ridge") {
    if (!j.contains("lambda")) throw ConfigError(context + ": ridge needs 'lambda'");
    const double lambda = j.at("lambda").get<double>();
    if (!(lambda > 0.0)) throw ConfigError(context + ": lambda must be positive");
    return TrainMethod::ridge(lambda);
  }
  throw ConfigError(context + ": unknown method kind '" + kind + "'");
}

Json method_to_json(const TrainMethod& m) {
  if (m.kind == TrainMethod::Kind::Ridge) return {{"kind", "ridge"}, {"lambda", m.lambda}};
  return {{"kind", "pinv"}, {"rcond", m.rcond}};
}

SamplingOptions sampling_from_json(const Json& j, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
  SamplingOptions s;
  const std::string mode = j.value("mode", std::string("multinomial"));
  if (mode == "multinomial") {
    s.mode = SamplingMode::Multinomial;
  } else if (mode == "poisson") {
    s.mode = SamplingMode::Poisson;
  } else {
    throw ConfigError(context + ": unknown sampling mode '" + mode + "'");
  }
  s.eta_extra = j.value("eta_extra", 1.0);
  if (!(s.eta_extra > 0.0 && s.eta_extra <= 1.0)) throw ConfigError(context + ": eta_extra must be in (0, 1]");
  return s;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Dataset make_dataset(const ExperimentConfig& cfg, const SplitSizes& s, std::size_t n_ent, std::uint64_t seed) {
  Dataset d = generate_dataset(cfg.ref_sep, cfg.ref_ent, s.n_sep, n_ent, cfg.mode, seed);
  if (s.n_partial > 0) append_states(d, *cfg.ref_partial, s.n_partial, s.n_sep + n_ent);
  return d;
}

Index target_row(const ExperimentConfig& cfg, const std::string& name) {
  for (std::size_t j = 0; j < cfg.targets.size(); ++j) {
    if (cfg.targets[j].name == name) return static_cast<Index>(j);
  }
  throw ConfigError("witness '" + name + "' is not among the configured targets");
}

CountsMatrix select_columns(const CountsMatrix& c, const std::vector<std::size_t>& idx) {
  CountsMatrix out{CountMatrix(c.counts.rows(), static_cast<Index>(idx.size())), {}};
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.counts.col(static_cast<Index>(k)) = c.counts.col(static_cast<Index>(idx[k]));
    out.shots.push_back(c.shots.at(idx[k]));
  }
  return out;
}

RealMatrix select_columns(const RealMatrix& m, const std::vector<std::size_t>& idx) {
  RealMatrix out(m.rows(), static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Index>(k)) = m.col(static_cast<Index>(idx[k]));
  return out;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

}  // namespace

std::size_t Composition::entangled_count(std::size_t n_ent) const {
  switch (kind) {
    case Kind::Mixed: return n_ent;
    case Kind::SeparableOnly: return 0;
    case Kind::PlusKEntangled: return k;
  }
  return n_ent;
}

std::string to_string(const Composition& c) {
  switch (c.kind) {
    case Composition::Kind::Mixed: return "mixed";
    case Composition::Kind::SeparableOnly: return "separable_only";
    case Composition::Kind::PlusKEntangled: return "plus_" + std::to_string(c.k) + "_entangled";
  }
  return "mixed";
}

std::vector<std::string> ExperimentConfig::target_names() const {
  std::vector<std::string> names;
  for (const Observable& o : targets) names.push_back(o.name);
  return names;
}

Json ExperimentConfig::to_json() const {
  Json refs = {{"sep", reference_to_json(ref_sep)}, {"ent", reference_to_json(ref_ent)}};
  if (ref_partial) refs["partial"] = reference_to_json(*ref_partial);
  std::vector<Observable> custom;
  for (const Observable& o : targets) {
    try {
      observable_by_name(o.name);
    } catch (const ConfigError&) {
      custom.push_back(o);
    }
  }
  Json j = {{"reservoir", reservoir_to_json(reservoir)},
            {"references", refs},
            {"train", sizes_to_json(train)},
            {"test", sizes_to_json(test)},
            {"mode", qelm::to_string(mode)},
            {"shots", shots ? Json(*shots) : Json(nullptr)},
            {"seed", seed},
            {"targets", target_names()},
            {"witness", witness},
            {"composition", composition_to_json(composition)},
            {"repeats", repeats},
            {"input_form", qelm::to_string(input_form)},
            {"method", method_to_json(method)},
            {"sampling",
             {{"mode", sampling.mode == SamplingMode::Poisson ? "poisson" : "multinomial"},
              {"eta_extra", sampling.eta_extra}}},
            {"loss", loss_to_json(loss)},
            {"n_list", n_list},
            {"p_list", p_list}};
  if (!custom.empty()) j["observables"] = observables_to_json(custom);
  return j;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json().dump())));
  return buf;
}

ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (!kConfigKeys.count(key)) throw ConfigError(context + ": unknown key '" + key + "'");
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("reservoir")) {
      const Json& r = j.at("reservoir");
      if (r.is_string()) {
        cfg.reservoir_source = r.get<std::string>();
        std::filesystem::path p = cfg.reservoir_source;
        if (p.is_relative()) p = base_dir / p;
        if (!std::filesystem::exists(p)) {
          throw ConfigError(context + ": key 'reservoir': file '" + p.string() + "' does not exist");
        }
        cfg.reservoir = reservoir_from_json(read_json(p), p.string());
      } else {
        cfg.reservoir_source = "inline";
        cfg.reservoir = reservoir_from_json(r, context + ".reservoir");
      }
    }
    if (j.contains("references")) {
      const Json& refs = j.at("references");
      const std::string ctx = context + ".references";
      if (!refs.is_object()) throw ConfigError(ctx + ": expected an object");
      for (const auto& [key, v] : refs.items()) {
        if (key != "sep" && key != "ent" && key != "partial") throw ConfigError(ctx + ": unknown key '" + key + "'");
      }
      if (refs.contains("sep")) cfg.ref_sep = reference_entry(refs.at("sep"), ctx + ".sep");
      if (refs.contains("ent")) cfg.ref_ent = reference_entry(refs.at("ent"), ctx + ".ent");
      if (refs.contains("partial")) cfg.ref_partial = reference_entry(refs.at("partial"), ctx + ".partial");
    }
    if (j.contains("train")) cfg.train = sizes_from_json(j.at("train"), context + ".train");
    if (j.contains("test")) cfg.test = sizes_from_json(j.at("test"), context + ".test");
    if (j.contains("mode")) cfg.mode = prep_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("shots") && j.at("shots").is_null()) cfg.shots.reset();
    if (j.contains("shots") && !j.at("shots").is_null()) {
      if (!j.at("shots").is_number_integer() || j.at("shots").get<std::int64_t>() < 0) {
        throw ConfigError(context + ": key 'shots' must be a non-negative integer or null");
      }
      cfg.shots = j.at("shots").get<std::int64_t>();
    }
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_integer()) throw ConfigError(context + ": key 'seed' must be an integer");
      cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    std::vector<Observable> custom;
    if (j.contains("observables")) {
      const Json& o = j.at("observables");
      if (o.is_string()) {
        std::filesystem::path p = o.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        if (!std::filesystem::exists(p)) {
          throw ConfigError(context + ": key 'observables': file '" + p.string() + "' does not exist");
        }
        custom = observables_from_json(read_json(p));
      } else {
        custom = observables_from_json(o);
      }
    }
    if (j.contains("targets")) {
      cfg.targets.clear();
      for (const Json& name_j : j.at("targets")) {
        const std::string name = name_j.get<std::string>();
        const auto it = std::find_if(custom.begin(), custom.end(), [&](const Observable& o) { return o.name == name; });
        cfg.targets.push_back(it != custom.end() ? *it : observable_by_name(name));
      }
      if (cfg.targets.empty()) throw ConfigError(context + ": key 'targets' must not be empty");
    }
    if (j.contains("witness")) cfg.witness = j.at("witness").get<std::string>();
    if (j.contains("composition")) cfg.composition = composition_from_json(j.at("composition"), context + ".composition");
    if (j.contains("repeats")) cfg.repeats = count_at(j, "repeats", cfg.repeats, context);
    if (j.contains("input_form")) cfg.input_form = input_form_from_string(j.at("input_form").get<std::string>());
    if (j.contains("method")) cfg.method = method_from_json(j.at("method"), context + ".method");
    if (j.contains("sampling")) cfg.sampling = sampling_from_json(j.at("sampling"), context + ".sampling");
    if (j.contains("loss")) cfg.loss = loss_from_json(j.at("loss"), context + ".loss");
    if (j.contains("n_list")) cfg.n_list = j.at("n_list").get<std::vector<std::int64_t>>();
    if (j.contains("p_list")) cfg.p_list = j.at("p_list").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw ConfigError(context + ": wrong value type (" + e.what() + ")");
  }
  if (cfg.repeats == 0) throw ConfigError(context + ": key 'repeats' must be at least 1");
  if (j.contains("witness")) {
    const auto names = cfg.target_names();
    if (std::find(names.begin(), names.end(), cfg.witness) == names.end()) {
      throw ConfigError(context + ": key 'witness': '" + cfg.witness + "' is not among the targets");
    }
  }
  if ((cfg.train.n_partial > 0 || cfg.test.n_partial > 0) && !cfg.ref_partial) {
    throw ConfigError(context + ": n_partial > 0 requires references.partial");
  }
  if (cfg.test.n_sep + cfg.test.n_ent + cfg.test.n_partial == 0) throw ConfigError(context + ": test split is empty");
  for (std::int64_t n : cfg.n_list) {
    if (n <= 0) throw ConfigError(context + ": key 'n_list' entries must be positive");
  }
  for (double p : cfg.p_list) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(context + ": key 'p_list' entries must be in [0, 1]");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json(path), path.parent_path(), path.string());
}

RealMatrix truth_matrix(const std::vector<Observable>& obs, const Dataset& d) {
  RealMatrix m(static_cast<Index>(obs.size()), static_cast<Index>(d.states.size()));
  for (std::size_t k = 0; k < d.states.size(); ++k) {
    const LabeledState& s = d.states[k];
    std::optional<ComplexMatrix> rho_truth;
    for (std::size_t j = 0; j < obs.size(); ++j) {
      const auto it = s.true_values.find(obs[j].name);
      double v;
      if (it != s.true_values.end()) {
        v = it->second;
      } else {
        if (!rho_truth) {
          const ComplexVector psi = prepared_ket(s.truth_reference, s.prep);
          rho_truth = psi * psi.adjoint();
        }
        v = expectation_value(obs[j].matrix, *rho_truth);
      }
      m(static_cast<Index>(j), static_cast<Index>(k)) = v;
    }
  }
  return m;
}

PreparedSplit prepare_split(const ExperimentConfig& cfg, const EffectivePovm& povm, std::size_t r) {
  const std::uint64_t rr = r;
  PreparedSplit s;
  s.train = make_dataset(cfg, cfg.train, cfg.composition.entangled_count(cfg.train.n_ent),
                         derive_seed(cfg.seed, {rr, 0}));
  s.test = make_dataset(cfg, cfg.test, cfg.test.n_ent, derive_seed(cfg.seed, {rr, 1}));
  s.train_data = build_matrices(s.train, povm, cfg.shots, derive_seed(cfg.seed, {rr, 2}), cfg.sampling);
  s.test_data = build_matrices(s.test, povm, cfg.shots, derive_seed(cfg.seed, {rr, 3}), cfg.sampling);
  return s;
}

SplitResult run_split(const ExperimentConfig& cfg, const PreparedSplit& split, std::size_t r) {
  SplitResult out;
  out.index = r;
  TrainOptions opts;
  opts.method = cfg.method;
  opts.input_form = cfg.input_form;
  out.trained = train(statistics_matrix(split.train_data, cfg.input_form), truth_matrix(cfg.targets, split.train),
                      cfg.target_names(), opts);
  const auto names = cfg.target_names();
  std::optional<std::string> witness;
  if (std::find(names.begin(), names.end(), cfg.witness) != names.end()) witness = cfg.witness;
  out.eval = evaluate(out.trained.readout, out.trained.report, statistics_matrix(split.test_data, cfg.input_form),
                      truth_matrix(cfg.targets, split.test), cfg.input_form, witness);
  for (const LabeledState& s : split.test.states) out.test_labels.push_back(s.label);
  return out;
}

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd m;
  if (v.empty()) return m;
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

ScenarioResult run_scenario(const ExperimentConfig& cfg) {
  const EffectivePovm povm = effective_povm(cfg.reservoir);
  ScenarioResult result;
  result.splits = parallel_map(cfg.repeats, [&](std::size_t r) {
    const PreparedSplit split = prepare_split(cfg, povm, r);
    return run_split(cfg, split, r);
  });

  ScenarioSummary& s = result.summary;
  s.observables = cfg.target_names();
  std::vector<double> avg, acc, recall, certified;
  for (std::size_t j = 0; j < s.observables.size(); ++j) {
    std::vector<double> tr, te;
    for (const SplitResult& sp : result.splits) {
      tr.push_back(sp.trained.report.mse_train(static_cast<Index>(j)));
      te.push_back(sp.eval.mse_test(static_cast<Index>(j)));
    }
    s.mse_train.push_back(mean_std(tr));
    s.mse_test.push_back(mean_std(te));
  }
  for (const SplitResult& sp : result.splits) {
    avg.push_back(sp.eval.mse_test.mean());
    if (sp.eval.confusion) {
      acc.push_back(sp.eval.confusion->accuracy);
      recall.push_back(sp.eval.confusion->negative_recall);
      certified.push_back(sp.eval.confusion->certified_fraction);
    }
  }
  s.mse_test_avg = mean_std(avg);
  if (!acc.empty()) {
    s.accuracy = mean_std(acc);
    s.negative_recall = mean_std(recall);
    s.certified_fraction = mean_std(certified);
  }
  return result;
}

std::vector<SweepPoint> sweep_statistics(const ExperimentConfig& cfg, const std::vector<std::int64_t>& n_list) {
  if (n_list.empty()) throw ConfigError("sweep_statistics: empty N list");
  const EffectivePovm povm = effective_povm(cfg.reservoir);
  const std::size_t reps = cfg.repeats;
  // Repeat r reuses the same states and stream ids at every N.
  const auto mses = parallel_map(n_list.size() * reps, [&](std::size_t t) {
    ExperimentConfig c = cfg;
    c.shots = n_list[t / reps];
    const std::size_t r = t % reps;
    return run_split(c, prepare_split(c, povm, r), r).eval.mse_test.mean();
  });
  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    out.push_back({n_list[i], mean_std(std::vector<double>(mses.begin() + static_cast<std::ptrdiff_t>(i * reps),
                                                           mses.begin() + static_cast<std::ptrdiff_t>((i + 1) * reps)))});
  }
  return out;
}

std::vector<NoisePoint> noise_sweep(const ExperimentConfig& cfg, const std::vector<double>& p_list) {
  std::vector<double> ps = p_list;
  if (ps.empty()) {
    for (int i = 0; i <= 20; ++i) ps.push_back(i / 20.0);
  }
  for (double p : ps) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("noise_sweep: p must be in [0, 1]");
  }
  const Index w = target_row(cfg, cfg.witness);
  const EffectivePovm povm = effective_povm(cfg.reservoir);
  const std::size_t n = cfg.test.n_ent;
  if (n == 0) throw ConfigError("noise_sweep: test.n_ent must be positive");

  struct RepeatOut {
    std::vector<double> mse, accuracy;
  };
  const auto reps = parallel_map(cfg.repeats, [&](std::size_t r) {
    const std::uint64_t rr = r;
    const PreparedSplit split = prepare_split(cfg, povm, r);
    const SplitResult trained = run_split(cfg, split, r);
    const std::uint64_t test_seed = derive_seed(cfg.seed, {rr, 1});
    // Entangled state k and separable state k share stream k, hence angles.
    const Dataset ent = generate_dataset(cfg.ref_sep, cfg.ref_ent, 0, n, cfg.mode, test_seed);
    const Dataset sep = generate_dataset(cfg.ref_sep, cfg.ref_ent, n, 0, cfg.mode, test_seed);
    const ProbabilityMatrix p_ent = probability_matrix(ent.density_matrices(), povm, cfg.sampling.eta_extra);
    const ProbabilityMatrix p_sep = probability_matrix(sep.density_matrices(), povm, cfg.sampling.eta_extra);
    const RealVector truths = truth_matrix(cfg.targets, ent).row(w).transpose();
    const double mse_train = trained.trained.report.mse_train(w);
    RepeatOut out;
    for (double p : ps) {
      ProbabilityMatrix mixed{RealMatrix(kOutcomes, static_cast<Index>(n)), RealVector(static_cast<Index>(n))};
      for (Index k = 0; k < static_cast<Index>(n); ++k) {
        const ProbabilityVector m = mix_distributions(column(p_ent, k), column(p_sep, k), p);
        mixed.probs.col(k) = m.probs;
        mixed.loss(k) = m.loss;
      }
      RealMatrix stats;
      if (cfg.shots) {
        stats = statistics_matrix(
            sample_matrix(mixed, *cfg.shots, derive_seed(cfg.seed, {rr, 4}), cfg.sampling.mode), cfg.input_form);
      } else {
        stats = statistics_matrix(mixed, cfg.input_form);
      }
      const RealVector preds = predict(trained.trained.readout, stats, cfg.input_form).row(w).transpose();
      out.mse.push_back(mse(preds, truths));
      out.accuracy.push_back(witness_confusion(preds, truths, mse_train).accuracy);
    }
    return out;
  });
  std::vector<NoisePoint> rows;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    std::vector<double> m, a;
    for (const RepeatOut& r : reps) {
      m.push_back(r.mse[i]);
      a.push_back(r.accuracy[i]);
    }
    rows.push_back({ps[i], mean_std(m), mean_std(a)});
  }
  return rows;
}

std::vector<SpectrumRow> singular_value_report(const ExperimentConfig& cfg, const std::vector<std::int64_t>& n_list) {
  const EffectivePovm povm = effective_povm(cfg.reservoir);
  ExperimentConfig exact_cfg = cfg;
  exact_cfg.shots.reset();
  const PreparedSplit split = prepare_split(exact_cfg, povm, 0);
  const ProbabilityMatrix& exact = split.train_data.exact;
  auto row = [](std::optional<std::int64_t> n, const RealMatrix& m) {
    SpectrumRow r;
    r.n = n;
    r.singular_values = singular_values(m);
    r.above_floor = numerical_rank(m, 1e-10);
    return r;
  };
  std::vector<SpectrumRow> rows{row(std::nullopt, exact.probs)};
  const auto sampled = parallel_map(n_list.size(), [&](std::size_t i) {
    const CountsMatrix c = sample_matrix(exact, n_list[i], derive_seed(cfg.seed, {0, 2}), cfg.sampling.mode);
    return row(n_list[i], statistics_matrix(c, InputForm::Frequencies));
  });
  rows.insert(rows.end(), sampled.begin(), sampled.end());
  return rows;
}

std::vector<BenchmarkRow> benchmark_shadow_vs_qelm(const ExperimentConfig& cfg) {
  const EffectivePovm povm = effective_povm(cfg.reservoir);
  const DualFrame duals = dual_frame(frame_superoperator(povm), povm);
  ExperimentConfig mixed_cfg = cfg;
  mixed_cfg.composition = {Composition::Kind::Mixed, 0};
  const std::vector<std::string> methods{"shadow_min_over_n", "qelm_separable_trained", "qelm_mixed_trained"};
  const std::vector<std::string> subsets{"all", "separable", "entangled"};
  const auto names = cfg.target_names();

  // One value per (method, subset), averaged over targets.
  const auto reps = parallel_map(cfg.repeats, [&](std::size_t r) {
    const PreparedSplit split = prepare_split(mixed_cfg, povm, r);
    const RealMatrix truths = truth_matrix(cfg.targets, split.test);
    const std::vector<std::vector<std::size_t>> idx{all_indices(split.test.states.size()),
                                                    split.test.indices_with({StateLabel::Separable}),
                                                    split.test.indices_with({StateLabel::Entangled, StateLabel::Partial})};
    std::vector<double> values(methods.size() * subsets.size(), 0.0);

    for (std::size_t s = 0; s < subsets.size(); ++s) {
      if (idx[s].empty()) continue;
      const RealMatrix t = select_columns(truths, idx[s]);
      double acc = 0.0;
      for (std::size_t j = 0; j < cfg.targets.size(); ++j) {
        const RealVector o = shadow_estimator(cfg.targets[j].matrix, duals);
        const RealVector tj = t.row(static_cast<Index>(j)).transpose();
        if (split.test_data.counts) {
          acc += min_mse_over_n(select_columns(*split.test_data.counts, idx[s]), tj, o, default_n_grid()).mse_min;
        } else {
          const RealMatrix p = select_columns(split.test_data.exact.probs, idx[s]);
          acc += mse(p.transpose() * o, tj);
        }
      }
      values[s] = acc / static_cast<double>(cfg.targets.size());
    }

    TrainOptions opts;
    opts.method = cfg.method;
    opts.input_form = cfg.input_form;
    const RealMatrix train_stats = statistics_matrix(split.train_data, cfg.input_form);
    const RealMatrix train_truths = truth_matrix(cfg.targets, split.train);
    const RealMatrix test_stats = statistics_matrix(split.test_data, cfg.input_form);
    const std::vector<std::vector<std::size_t>> train_idx{split.train.indices_with({StateLabel::Separable}),
                                                          all_indices(split.train.states.size())};
    for (std::size_t m = 0; m < 2; ++m) {
      const TrainResult tr = train(select_columns(train_stats, train_idx[m]),
                                   select_columns(train_truths, train_idx[m]), names, opts);
      const RealMatrix preds = predict(tr.readout, test_stats, cfg.input_form);
      for (std::size_t s = 0; s < subsets.size(); ++s) {
        if (idx[s].empty()) continue;
        const RealMatrix diff = select_columns(preds, idx[s]) - select_columns(truths, idx[s]);
        values[(m + 1) * subsets.size() + s] = diff.array().square().mean();
      }
    }
    return values;
  });

  std::vector<BenchmarkRow> rows;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      std::vector<double> v;
      for (const auto& r : reps) v.push_back(r[m * subsets.size() + s]);
      rows.push_back({methods[m], subsets[s], mean_std(v)});
    }
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractViolation("loglog_slope: need two or more points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw NumericalError("loglog_slope: non-positive value");
    mx += std::log10(x[i]) / n;
    my += std::log10(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log10(x[i]) - mx;
    sxy += dx * (std::log10(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::int64_t regime_entry_n(const std::vector<SweepPoint>& sweep, std::size_t fit_points, double factor) {
  if (sweep.empty() || fit_points == 0 || fit_points > sweep.size()) {
    throw ContractViolation("regime_entry_n: bad fit window");
  }
  double log_beta = 0.0;
  for (std::size_t i = sweep.size() - fit_points; i < sweep.size(); ++i) {
    log_beta += std::log(sweep[i].mse.mean * static_cast<double>(sweep[i].n)) / static_cast<double>(fit_points);
  }
  const double beta = std::exp(log_beta);
  std::int64_t entry = sweep.back().n;
  for (std::size_t i = sweep.size(); i-- > 0;) {
    const double ratio = sweep[i].mse.mean * static_cast<double>(sweep[i].n) / beta;
    if (ratio > factor || ratio < 1.0 / factor) break;
    entry = sweep[i].n;
  }
  return entry;
}

}  // namespace qelm::harness
