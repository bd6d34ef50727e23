#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace draftlmt {

// Numerically safe logistic function. The result is clamped to the open
// interval (0, 1) so that downstream log-losses stay finite.
double logistic(double log_odds);

// -[y log p + (1 - y) log(1 - p)] with p = logistic(log_odds), evaluated
// without forming p.
double log_loss(double log_odds, double label);

struct ColumnScaling {
  double mean = 0.0;
  double scale = 1.0;

  bool operator==(const ColumnScaling&) const = default;
};

struct FitDiagnostics {
  int iterations = 0;
  double gradient_norm = 0.0;  // infinity norm of the penalised score
  bool converged = false;
  // The ridge term holds the weights finite: its contribution to the score
  // exceeds 1000 * tol. Typical of (quasi-)separated leaves.
  bool ridge_binding = false;
  // ridge = 0 and the fitted log-odds classify every row strictly: no finite
  // maximizer exists, so the fit is reported as not converged.
  bool separated = false;
  double ridge = 0.0;

  bool operator==(const FitDiagnostics&) const = default;
};

// Logistic regression with weights on the standardized-feature scale:
//   log_odds(x) = intercept + sum_j weights[j] * (x[j] - mean_j) / scale_j
class LogisticModel {
 public:
  LogisticModel() = default;
  LogisticModel(double intercept, std::vector<double> weights, std::vector<ColumnScaling> scaling,
                FitDiagnostics diagnostics = {});

  // Constant model, unit scaling.
  static LogisticModel constant(double intercept, std::size_t width);

  double intercept() const { return intercept_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<ColumnScaling>& scaling() const { return scaling_; }
  const FitDiagnostics& diagnostics() const { return diagnostics_; }
  std::size_t width() const { return weights_.size(); }

  // Weights and intercept for unstandardized inputs.
  std::vector<double> raw_weights() const;
  double raw_intercept() const;

  // (x[j] - mean_j) / scale_j
  std::vector<double> standardize(std::span<const double> x) const;

  double log_odds(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const;

  bool operator==(const LogisticModel&) const = default;

 private:
  void check_width(std::size_t n) const;

  double intercept_ = 0.0;
  std::vector<double> weights_;
  std::vector<ColumnScaling> scaling_;
  FitDiagnostics diagnostics_;
};

struct FitOptions {
  double ridge = 1e-6;
  double tol = 1e-8;
  int max_iter = 100;
};

// Penalized maximum likelihood by iteratively reweighted least squares with
// step halving. Minimizes
//   sum_i log_loss(eta_i, y_i) + ridge / 2 * |w|^2
// over the intercept (unpenalized) and standardized weights w. Columns with
// zero variance keep weight 0. Non-convergence (for example separation with
// ridge = 0) is reported through diagnostics, not thrown.
LogisticModel fit_mle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const FitOptions& options = {});

// Objective and gradient of the penalized negative log-likelihood on the
// standardized design, with the intercept first in `params`. Exposed for
// verification.
struct PenalizedObjective {
  double value = 0.0;
  Eigen::VectorXd gradient;
};
PenalizedObjective penalized_nll(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& params, double ridge);

// Per-column mean and population standard deviation; constant columns get
// scale 1.
std::vector<ColumnScaling> column_scaling(const Eigen::MatrixXd& X);

// Score residual X_std^T (y - p) - ridge * w, intercept first, evaluated at
// the model's parameters on the model's own standardization.
Eigen::VectorXd score_residual(const LogisticModel& model, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y, double ridge);

// One stage of an additive logistic model: offset + slope * x[feature], in
// log-odds units.
struct Stage {
  std::size_t feature = 0;
  double slope = 0.0;
  double offset = 0.0;

  bool operator==(const Stage&) const = default;
};

class AdditiveStageModel {
 public:
  AdditiveStageModel() = default;
  explicit AdditiveStageModel(double base, std::vector<Stage> stages = {})
      : base_(base), stages_(std::move(stages)) {}

  double base() const { return base_; }
  const std::vector<Stage>& stages() const { return stages_; }
  std::size_t stage_count() const { return stages_.size(); }
  void add_stage(const Stage& stage) { stages_.push_back(stage); }

  double log_odds(std::span<const double> x) const;
  double predict_proba(std::span<const double> x) const { return logistic(log_odds(x)); }

  bool operator==(const AdditiveStageModel&) const = default;

 private:
  double base_ = 0.0;
  std::vector<Stage> stages_;
};

struct BoostOptions {
  int stages = 20;
  double weight_floor = 1e-10;
  double max_response = 3.0;  // |z| cap on working responses
};

// Two-class LogitBoost with single-feature simple linear regressions as base
// learners. Starts at the clamped base-rate log-odds. Each stage is halved
// until the training log-loss does not increase, so the per-stage training
// loss is non-increasing. A single-class input returns the constant model.
AdditiveStageModel logitboost_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const BoostOptions& options = {});

// Continues boosting from `start` (used for child nodes inheriting the
// parent's additive model).
AdditiveStageModel logitboost_continue(const AdditiveStageModel& start, const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& y, const BoostOptions& options = {});

// Mean log-loss of a model over the rows of X.
double mean_log_loss(const AdditiveStageModel& model, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& y);
double mean_log_loss(const LogisticModel& model, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& y);

}  // namespace draftlmt
