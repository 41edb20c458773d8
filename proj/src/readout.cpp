#include "qelm/readout.hpp"

#include <algorithm>
#include <cmath>

namespace qelm {

namespace {

RealMatrix with_bias_row(const RealMatrix& data) {
  RealMatrix out(data.rows() + 1, data.cols());
  out.topRows(data.rows()) = data;
  out.row(data.rows()).setOnes();
  return out;
}

}  // namespace

std::string to_string(InputForm form) {
  switch (form) {
    case InputForm::Frequencies: return "frequencies";
    case InputForm::RawCounts: return "raw_counts";
    case InputForm::NormalizedCounts: return "normalized_counts";
  }
  return "frequencies";
}

InputForm input_form_from_string(const std::string& s) {
  if (s == "frequencies") return InputForm::Frequencies;
  if (s == "raw_counts") return InputForm::RawCounts;
  if (s == "normalized_counts") return InputForm::NormalizedCounts;
  throw ConfigError("unknown input form '" + s + "'");
}

RealMatrix statistics_matrix(const CountsMatrix& counts, InputForm form) {
  RealMatrix out = counts.counts.cast<double>();
  for (Index k = 0; k < out.cols(); ++k) {
    if (form == InputForm::Frequencies) {
      const auto shots = counts.shots.at(static_cast<std::size_t>(k));
      if (shots <= 0) throw EmptyStatisticsError("frequencies: column has no shots");
      out.col(k) /= static_cast<double>(shots);
    } else if (form == InputForm::NormalizedCounts) {
      const double total = out.col(k).sum();
      if (total <= 0.0) throw EmptyStatisticsError("normalized counts: column has no observed counts");
      out.col(k) /= total;
    }
  }
  return out;
}

RealMatrix statistics_matrix(const ProbabilityMatrix& exact, InputForm form) {
  switch (form) {
    case InputForm::Frequencies: return exact.probs;
    case InputForm::RawCounts: throw ContractViolation("raw counts are undefined at infinite statistics");
    case InputForm::NormalizedCounts: {
      RealMatrix out = exact.probs;
      for (Index k = 0; k < out.cols(); ++k) {
        const double total = out.col(k).sum();
        if (total <= 0.0) throw EmptyStatisticsError("normalized probabilities: column has zero mass");
        out.col(k) /= total;
      }
      return out;
    }
  }
  return exact.probs;
}

RealMatrix statistics_matrix(const MeasurementData& data, InputForm form) {
  return data.counts ? statistics_matrix(*data.counts, form) : statistics_matrix(data.exact, form);
}

TrainResult train(const RealMatrix& data, const RealMatrix& targets, std::vector<std::string> observable_names,
                  const TrainOptions& options) {
  if (data.cols() < 1) throw ContractViolation("train: no training states");
  if (data.cols() != targets.cols()) throw ContractViolation("train: data and targets are not column-aligned");
  if (static_cast<Index>(observable_names.size()) != targets.rows()) {
    throw ContractViolation("train: one name per target row is required");
  }
  if (!data.allFinite() || !targets.allFinite()) throw TrainingError("train: non-finite inputs");
  if (data.cwiseAbs().maxCoeff() == 0.0) throw TrainingError("train: statistics matrix is identically zero");

  const RealMatrix design = options.affine ? with_bias_row(data) : data;
  ReadoutMatrix w;
  w.trained_on = options.input_form;
  w.affine = options.affine;
  w.observables = std::move(observable_names);
  w.rcond = options.method.rcond;

  if (options.method.kind == TrainMethod::Kind::Pinv) {
    w.weights = targets * pseudoinverse(design, options.method.rcond);
  } else {
    if (!(options.method.lambda > 0.0)) throw ContractViolation("train: ridge lambda must be positive");
    w.ridge_lambda = options.method.lambda;
    const RealMatrix gram =
        design * design.transpose() + options.method.lambda * RealMatrix::Identity(design.rows(), design.rows());
    // W = M_O D^T (D D^T + lambda I)^{-1}, solved on the transposed system.
    w.weights = gram.ldlt().solve(design * targets.transpose()).transpose();
  }
  if (!w.weights.allFinite()) throw TrainingError("train: readout has non-finite entries");

  TrainReport report;
  const RealMatrix fitted = w.weights * design;
  report.mse_train = (fitted - targets).array().square().rowwise().mean();
  const RealVector s = singular_values(data);
  report.singular_spectrum = RealVector::Zero(std::max<Index>(data.rows(), s.size()));
  report.singular_spectrum.head(s.size()) = s;
  report.effective_rank = numerical_rank(data, options.method.rcond);
  return {std::move(w), std::move(report)};
}

RealMatrix predict(const ReadoutMatrix& w, const RealMatrix& stats, InputForm form) {
  if (form != w.trained_on) {
    throw ContractViolation("predict: statistics are " + to_string(form) + " but the readout expects " +
                            to_string(w.trained_on));
  }
  if (stats.rows() != w.outcomes()) throw ContractViolation("predict: outcome count mismatch");
  return w.affine ? RealMatrix(w.weights * with_bias_row(stats)) : RealMatrix(w.weights * stats);
}

RealVector predict(const ReadoutMatrix& w, const RealVector& stats, InputForm form) {
  return predict(w, RealMatrix(stats), form).col(0);
}

double mse(const RealVector& preds, const RealVector& truths) {
  if (preds.size() != truths.size()) throw ContractViolation("mse: length mismatch");
  if (preds.size() == 0) return 0.0;
  return (preds - truths).squaredNorm() / static_cast<double>(preds.size());
}

WitnessConfusion witness_confusion(const RealVector& preds, const RealVector& truths, double mse_train,
                                   double threshold) {
  if (preds.size() != truths.size()) throw ContractViolation("witness_confusion: length mismatch");
  WitnessConfusion c;
  c.total = preds.size();
  const double certify_below = -3.0 * std::sqrt(std::max(mse_train, 0.0));
  Index negatives = 0;
  Index certified = 0;
  for (Index i = 0; i < preds.size(); ++i) {
    const int truth_row = truths(i) < threshold ? 0 : 1;
    const int pred_col = preds(i) < threshold ? 0 : 1;
    ++c.table[static_cast<std::size_t>(truth_row)][static_cast<std::size_t>(pred_col)];
    if (truth_row == 0) {
      ++negatives;
      if (preds(i) < certify_below) ++certified;
    }
  }
  if (c.total > 0) c.accuracy = static_cast<double>(c.table[0][0] + c.table[1][1]) / static_cast<double>(c.total);
  if (negatives > 0) {
    c.negative_recall = static_cast<double>(c.table[0][0]) / static_cast<double>(negatives);
    c.certified_fraction = static_cast<double>(certified) / static_cast<double>(negatives);
  }
  return c;
}

EvalReport evaluate(const ReadoutMatrix& w, const TrainReport& train_report, const RealMatrix& stats,
                    const RealMatrix& truths, InputForm form, const std::optional<std::string>& witness) {
  if (truths.rows() != w.weights.rows() || truths.cols() != stats.cols()) {
    throw ContractViolation("evaluate: truths do not match readout/statistics shapes");
  }
  EvalReport r;
  r.observables = w.observables;
  r.predictions = predict(w, stats, form);
  r.truths = truths;
  r.mse_test = (r.predictions - truths).array().square().rowwise().mean();
  if (witness) {
    const auto it = std::find(w.observables.begin(), w.observables.end(), *witness);
    if (it != w.observables.end()) {
      const Index j = it - w.observables.begin();
      r.confusion = witness_confusion(r.predictions.row(j).transpose(), truths.row(j).transpose(),
                                      train_report.mse_train(j));
    }
  }
  return r;
}

}  // namespace qelm
