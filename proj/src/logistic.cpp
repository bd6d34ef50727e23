#include "draftlmt/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "draftlmt/error.hpp"

namespace draftlmt {
namespace {

constexpr double kBaseRateClamp = 1e-10;
constexpr int kMaxHalvings = 40;

// Largest double below 1.
const double kUpperProbability = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double clamped_log_odds(double rate) {
  rate = std::clamp(rate, kBaseRateClamp, 1.0 - kBaseRateClamp);
  return std::log(rate / (1.0 - rate));
}

bool is_constant(const ColumnScaling& s, double sd) {
  return !(sd > 1e-12 * (1.0 + std::abs(s.mean)));
}

struct Standardized {
  Eigen::MatrixXd Z;                  // active columns only
  std::vector<Eigen::Index> active;   // original column index of each Z column
  std::vector<ColumnScaling> scaling;
};

Standardized standardize_design(const Eigen::MatrixXd& X) {
  Standardized out;
  const Eigen::Index n = X.rows();
  out.scaling.resize(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    const double sd = std::sqrt((X.col(j).array() - mean).square().sum() / static_cast<double>(n));
    ColumnScaling s{mean, sd};
    if (is_constant(s, sd)) {
      s.scale = 1.0;
    } else {
      out.active.push_back(j);
    }
    out.scaling[static_cast<std::size_t>(j)] = s;
  }
  out.Z.resize(n, static_cast<Eigen::Index>(out.active.size()));
  for (std::size_t k = 0; k < out.active.size(); ++k) {
    const auto j = out.active[k];
    const auto& s = out.scaling[static_cast<std::size_t>(j)];
    out.Z.col(static_cast<Eigen::Index>(k)) = (X.col(j).array() - s.mean) / s.scale;
  }
  return out;
}

}  // namespace

double logistic(double log_odds) {
  double p;
  if (log_odds >= 0) {
    p = 1.0 / (1.0 + std::exp(-log_odds));
  } else {
    const double e = std::exp(log_odds);
    p = e / (1.0 + e);
  }
  return std::clamp(p, std::numeric_limits<double>::min(), kUpperProbability);
}

double log_loss(double log_odds, double label) { return softplus(log_odds) - label * log_odds; }

LogisticModel::LogisticModel(double intercept, std::vector<double> weights,
                             std::vector<ColumnScaling> scaling, FitDiagnostics diagnostics)
    : intercept_(intercept),
      weights_(std::move(weights)),
      scaling_(std::move(scaling)),
      diagnostics_(diagnostics) {
  if (scaling_.size() != weights_.size()) {
    throw Error("logistic model: " + std::to_string(weights_.size()) + " weights but " +
                std::to_string(scaling_.size()) + " scaling entries");
  }
  for (const auto& s : scaling_) {
    if (!(s.scale > 0) || !std::isfinite(s.scale)) throw Error("logistic model: non-positive scale");
  }
}

LogisticModel LogisticModel::constant(double intercept, std::size_t width) {
  FitDiagnostics diag;
  diag.converged = true;
  return LogisticModel(intercept, std::vector<double>(width, 0.0), std::vector<ColumnScaling>(width), diag);
}

std::vector<double> LogisticModel::raw_weights() const {
  std::vector<double> out(weights_.size());
  for (std::size_t j = 0; j < weights_.size(); ++j) out[j] = weights_[j] / scaling_[j].scale;
  return out;
}

double LogisticModel::raw_intercept() const {
  double b = intercept_;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    b -= weights_[j] * scaling_[j].mean / scaling_[j].scale;
  }
  return b;
}

void LogisticModel::check_width(std::size_t n) const {
  if (n != weights_.size()) {
    throw SchemaMismatchError("feature vector has " + std::to_string(n) +
                              " entries, model expects " + std::to_string(weights_.size()));
  }
}

std::vector<double> LogisticModel::standardize(std::span<const double> x) const {
  check_width(x.size());
  std::vector<double> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - scaling_[j].mean) / scaling_[j].scale;
  return z;
}

double LogisticModel::log_odds(std::span<const double> x) const {
  check_width(x.size());
  double eta = intercept_;
  for (std::size_t j = 0; j < x.size(); ++j) {
    eta += weights_[j] * ((x[j] - scaling_[j].mean) / scaling_[j].scale);
  }
  return eta;
}

double LogisticModel::predict_proba(std::span<const double> x) const {
  return logistic(log_odds(x));
}

std::vector<ColumnScaling> column_scaling(const Eigen::MatrixXd& X) {
  return standardize_design(X).scaling;
}

PenalizedObjective penalized_nll(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& params, double ridge) {
  const Eigen::Index k = Z.cols();
  const Eigen::VectorXd w = params.tail(k);
  const Eigen::VectorXd eta = (Z * w).array() + params[0];
  PenalizedObjective out;
  Eigen::VectorXd residual(eta.size());  // p - y
  double value = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    value += log_loss(eta[i], y[i]);
    residual[i] = logistic(eta[i]) - y[i];
  }
  out.value = value + 0.5 * ridge * w.squaredNorm();
  out.gradient.resize(k + 1);
  out.gradient[0] = residual.sum();
  out.gradient.tail(k) = Z.transpose() * residual + ridge * w;
  return out;
}

LogisticModel fit_mle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const FitOptions& options) {
  if (X.rows() == 0) throw ValidationError("fit_mle: empty design matrix");
  if (X.cols() == 0) throw ValidationError("fit_mle: no feature columns");
  if (X.rows() != y.size()) throw ValidationError("fit_mle: label count differs from row count");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) throw ValidationError("fit_mle: labels must be 0 or 1");
  }
  if (options.ridge < 0) throw ValidationError("fit_mle: ridge must be non-negative");

  const auto design = standardize_design(X);
  const Eigen::MatrixXd& Z = design.Z;
  const Eigen::Index k = Z.cols();
  const Eigen::Index n = Z.rows();

  Eigen::VectorXd params = Eigen::VectorXd::Zero(k + 1);
  params[0] = clamped_log_odds(y.mean());

  FitDiagnostics diag;
  diag.ridge = options.ridge;
  auto current = penalized_nll(Z, y, params, options.ridge);
  diag.gradient_norm = current.gradient.lpNorm<Eigen::Infinity>();

  while (diag.gradient_norm > options.tol && diag.iterations < options.max_iter) {
    const Eigen::VectorXd eta = (Z * params.tail(k)).array() + params[0];
    Eigen::VectorXd curvature(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = logistic(eta[i]);
      curvature[i] = p * (1.0 - p);
    }
    Eigen::MatrixXd H(k + 1, k + 1);
    H(0, 0) = curvature.sum();
    if (k > 0) {
      const Eigen::VectorXd zc = Z.transpose() * curvature;
      H.block(1, 0, k, 1) = zc;
      H.block(0, 1, 1, k) = zc.transpose();
      H.block(1, 1, k, k) = Z.transpose() * curvature.asDiagonal() * Z;
      H.block(1, 1, k, k).diagonal().array() += options.ridge;
    }
    H.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = H.ldlt().solve(current.gradient);

    bool accepted = false;
    double t = 1.0;
    for (int h = 0; h <= kMaxHalvings && step.allFinite(); ++h, t *= 0.5) {
      const Eigen::VectorXd trial = params - t * step;
      auto next = penalized_nll(Z, y, trial, options.ridge);
      const double next_norm = next.gradient.lpNorm<Eigen::Infinity>();
      const bool decreased = next.value < current.value;
      // Near the optimum the objective is flat to rounding; accept steps that
      // keep it level while shrinking the gradient.
      const bool level = next.value <= current.value + 1e-13 * (1.0 + std::abs(current.value)) &&
                         next_norm < diag.gradient_norm;
      if (decreased || level) {
        params = trial;
        current = std::move(next);
        diag.gradient_norm = next_norm;
        accepted = true;
        break;
      }
    }
    ++diag.iterations;
    if (!accepted) break;
  }
  if (options.ridge == 0.0) {
    const Eigen::VectorXd eta = (Z * params.tail(k)).array() + params[0];
    diag.separated = true;
    for (Eigen::Index i = 0; i < n && diag.separated; ++i) {
      diag.separated = y[i] > 0.5 ? eta[i] > 0 : eta[i] < 0;
    }
  }
  diag.converged = diag.gradient_norm <= options.tol && !diag.separated;

  std::vector<double> weights(static_cast<std::size_t>(X.cols()), 0.0);
  double max_weight = 0.0;
  for (std::size_t a = 0; a < design.active.size(); ++a) {
    const double w = params[static_cast<Eigen::Index>(a) + 1];
    weights[static_cast<std::size_t>(design.active[a])] = w;
    max_weight = std::max(max_weight, std::abs(w));
  }
  diag.ridge_binding = options.ridge * max_weight > 1e3 * options.tol;
  return LogisticModel(params[0], std::move(weights), design.scaling, diag);
}

Eigen::VectorXd score_residual(const LogisticModel& model, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y, double ridge) {
  const auto d = static_cast<Eigen::Index>(model.width());
  Eigen::VectorXd score = Eigen::VectorXd::Zero(d + 1);
  std::vector<double> row(model.width());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) row[static_cast<std::size_t>(j)] = X(i, j);
    const auto z = model.standardize(row);
    const double r = y[i] - model.predict_proba(row);
    score[0] += r;
    for (Eigen::Index j = 0; j < d; ++j) score[j + 1] += z[static_cast<std::size_t>(j)] * r;
  }
  for (Eigen::Index j = 0; j < d; ++j) score[j + 1] -= ridge * model.weights()[static_cast<std::size_t>(j)];
  return score;
}

double AdditiveStageModel::log_odds(std::span<const double> x) const {
  double eta = base_;
  for (const auto& s : stages_) {
    if (s.feature >= x.size()) {
      throw SchemaMismatchError("stage refers to feature " + std::to_string(s.feature) +
                                " of a " + std::to_string(x.size()) + "-wide vector");
    }
    eta += s.offset + s.slope * x[s.feature];
  }
  return eta;
}

AdditiveStageModel logitboost_continue(const AdditiveStageModel& start, const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& y, const BoostOptions& options) {
  if (X.rows() != y.size()) throw ValidationError("logitboost: label count differs from row count");
  if (options.stages < 0) throw ValidationError("logitboost: negative stage count");
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  AdditiveStageModel model = start;
  if (n == 0) return model;

  Eigen::VectorXd eta(n);
  std::vector<double> row(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) row[static_cast<std::size_t>(j)] = X(i, j);
    eta[i] = start.log_odds(row);
  }
  auto total_loss = [&](const Eigen::VectorXd& e) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += log_loss(e[i], y[i]);
    return s;
  };
  double loss = total_loss(eta);

  Eigen::VectorXd w(n), z(n);
  for (int m = 0; m < options.stages; ++m) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = logistic(eta[i]);
      w[i] = std::max(p * (1.0 - p), options.weight_floor);
      z[i] = std::clamp((y[i] - p) / w[i], -options.max_response, options.max_response);
    }
    const double W = w.sum();
    const double mz = w.dot(z) / W;

    Stage best{0, 0.0, mz};
    double best_reduction = -1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double mx = w.dot(X.col(j)) / W;
      const Eigen::ArrayXd dx = X.col(j).array() - mx;
      const double sxx = (w.array() * dx.square()).sum();
      double slope = 0.0;
      double reduction = 0.0;
      if (sxx > 1e-12 * W * (1.0 + mx * mx)) {
        const double sxz = (w.array() * dx * (z.array() - mz)).sum();
        slope = sxz / sxx;
        reduction = slope * sxz;
      }
      if (reduction > best_reduction) {
        best_reduction = reduction;
        best = Stage{static_cast<std::size_t>(j), slope, mz - slope * mx};
      }
    }

    Eigen::VectorXd step(n);
    for (Eigen::Index i = 0; i < n; ++i) step[i] = best.offset + best.slope * X(i, best.feature);
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
      const Eigen::VectorXd trial = eta + t * step;
      const double trial_loss = total_loss(trial);
      if (trial_loss <= loss) {
        eta = trial;
        loss = trial_loss;
        accepted = true;
        break;
      }
    }
    if (!accepted) t = 0.0;
    model.add_stage(Stage{best.feature, t * best.slope, t * best.offset});
  }
  return model;
}

AdditiveStageModel logitboost_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const BoostOptions& options) {
  if (X.rows() == 0) throw ValidationError("logitboost: empty design matrix");
  const double rate = y.mean();
  AdditiveStageModel start(clamped_log_odds(rate));
  if (rate == 0.0 || rate == 1.0) return start;
  return logitboost_continue(start, X, y, options);
}

double mean_log_loss(const AdditiveStageModel& model, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& y) {
  if (X.rows() == 0) return 0.0;
  std::vector<double> row(static_cast<std::size_t>(X.cols()));
  double s = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) row[static_cast<std::size_t>(j)] = X(i, j);
    s += log_loss(model.log_odds(row), y[i]);
  }
  return s / static_cast<double>(X.rows());
}

double mean_log_loss(const LogisticModel& model, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& y) {
  if (X.rows() == 0) return 0.0;
  std::vector<double> row(static_cast<std::size_t>(X.cols()));
  double s = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) row[static_cast<std::size_t>(j)] = X(i, j);
    s += log_loss(model.log_odds(row), y[i]);
  }
  return s / static_cast<double>(X.rows());
}

}  // namespace draftlmt
