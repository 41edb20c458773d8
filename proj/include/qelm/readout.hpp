// Linear readout training and evaluation.
//
// Training solves W D = M_O for the readout W, where column k of D holds the
// measured statistics of training state k and column k of M_O its true
// expectation values. The canonical solution is W = M_O D^+; a ridge variant
// regularizes D D^T. Predictions are plain matrix-vector products.
#ifndef QELM_READOUT_HPP
#define QELM_READOUT_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qelm/linalg.hpp"
#include "qelm/sampling.hpp"

namespace qelm {

enum class InputForm {
  Frequencies,       // counts / injected shots (exact probabilities at infinite statistics)
  RawCounts,         // counts as observed
  NormalizedCounts,  // counts / observed total
};

std::string to_string(InputForm form);
InputForm input_form_from_string(const std::string& s);

/// Statistics matrix in the requested form. Exact probabilities stand in for
/// counts when data.counts is empty; RawCounts then throws ContractViolation.
RealMatrix statistics_matrix(const MeasurementData& data, InputForm form);
RealMatrix statistics_matrix(const CountsMatrix& counts, InputForm form);
RealMatrix statistics_matrix(const ProbabilityMatrix& exact, InputForm form);

struct TrainMethod {
  enum class Kind { Pinv, Ridge };
  Kind kind = Kind::Pinv;
  double rcond = 1e-12;
  double lambda = 0.0;

  static TrainMethod pinv(double rcond = 1e-12) { return {Kind::Pinv, rcond, 0.0}; }
  static TrainMethod ridge(double lambda) { return {Kind::Ridge, 1e-12, lambda}; }
};

struct TrainOptions {
  TrainMethod method = TrainMethod::pinv();
  InputForm input_form = InputForm::NormalizedCounts;
  /// Appends a constant-one feature so the readout is affine.
  bool affine = false;
};

struct ReadoutMatrix {
  RealMatrix weights;  // N_obs x (outcomes [+ 1 when affine])
  InputForm trained_on = InputForm::NormalizedCounts;
  double rcond = 1e-12;
  std::optional<double> ridge_lambda;
  bool affine = false;
  std::vector<std::string> observables;

  Index outcomes() const { return weights.cols() - (affine ? 1 : 0); }
};

struct TrainReport {
  RealVector mse_train;          // per observable
  RealVector singular_spectrum;  // of the statistics matrix, padded to the outcome count
  Index effective_rank = 0;
};

struct TrainResult {
  ReadoutMatrix readout;
  TrainReport report;
};

/// `data` must already be in options.input_form. Throws TrainingError on an
/// all-zero statistics matrix.
TrainResult train(const RealMatrix& data, const RealMatrix& targets, std::vector<std::string> observable_names,
                  const TrainOptions& options = {});

/// W stats; throws ContractViolation when `form` differs from the form the
/// readout was trained on.
RealVector predict(const ReadoutMatrix& w, const RealVector& stats, InputForm form);
RealMatrix predict(const ReadoutMatrix& w, const RealMatrix& stats, InputForm form);

double mse(const RealVector& preds, const RealVector& truths);

/// Sign classification of a witness. Rows of `table` index the truth and
/// columns the prediction, 0 = negative (< threshold), 1 = non-negative.
struct WitnessConfusion {
  std::array<std::array<Index, 2>, 2> table{};
  double accuracy = 0.0;            // share of states whose predicted sign matches
  double negative_recall = 0.0;     // share of truly negative states predicted negative
  double certified_fraction = 0.0;  // share of truly negative states below -3 sqrt(mse_train)
  Index total = 0;
};

WitnessConfusion witness_confusion(const RealVector& preds, const RealVector& truths, double mse_train,
                                   double threshold = 0.0);

struct EvalReport {
  std::vector<std::string> observables;
  RealMatrix predictions;  // N_obs x N_states
  RealMatrix truths;
  RealVector mse_test;
  std::optional<WitnessConfusion> confusion;
};

/// Predicts every state and scores against truths. When `witness` names one of
/// the readout's observables, its confusion is filled in using that
/// observable's training MSE.
EvalReport evaluate(const ReadoutMatrix& w, const TrainReport& train_report, const RealMatrix& stats,
                    const RealMatrix& truths, InputForm form, const std::optional<std::string>& witness = std::nullopt);

}  // namespace qelm

#endif  // QELM_READOUT_HPP
