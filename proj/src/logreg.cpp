#include <algorithm>
#include <cmath>
#include <numeric>

#include "model_detail.hpp"
#include "urcminer/models.hpp"

namespace urcminer {
namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_finite(const Matrix& x) {
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw TrainingError("feature matrix contains NaN or infinity");
  }
}

}  // namespace

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  s.mean.assign(x.cols(), 0.0);
  s.scale.assign(x.cols(), 1.0);
  if (x.rows() == 0) return s;
  const auto n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) mean += x(r, c);
    mean /= n;
    double var = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) var += (x(r, c) - mean) * (x(r, c) - mean);
    var /= n;
    if (var > 0.0) {
      s.mean[c] = mean;
      s.scale[c] = std::sqrt(var);
    }
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  Matrix out = x;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean[c]) / scale[c];
  }
  return out;
}

namespace logreg {

Objective objective(const Matrix& x, std::span<const double> y, std::span<const double> w,
                    double b, double lambda) {
  const std::size_t n = x.rows();
  Objective obj;
  obj.grad_w.assign(x.cols(), 0.0);
  if (n == 0) return obj;
  const auto nd = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    const double z = dot(row, w) + b;
    obj.loss += softplus(z) - y[i] * z;
    const double r = sigmoid(z) - y[i];
    for (std::size_t j = 0; j < row.size(); ++j) obj.grad_w[j] += r * row[j];
    obj.grad_b += r;
  }
  obj.loss /= nd;
  obj.grad_b /= nd;
  const double reg = lambda / nd;
  for (std::size_t j = 0; j < w.size(); ++j) {
    obj.grad_w[j] = obj.grad_w[j] / nd + reg * w[j];
    obj.loss += 0.5 * reg * w[j] * w[j];
  }
  return obj;
}

Fit fit_binary(const Matrix& x, std::span<const double> y, const LogRegConfig& config) {
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxHalvings = 60;
  Fit fit;
  fit.w.assign(x.cols(), 0.0);
  Objective current = objective(x, y, fit.w, fit.b, config.l2_lambda);
  fit.loss_history.push_back(current.loss);
  double step = 1.0;
  std::vector<double> trial_w(x.cols());
  for (int it = 0; it < config.max_iter; ++it) {
    double gmax = std::abs(current.grad_b);
    double gnorm2 = current.grad_b * current.grad_b;
    for (double g : current.grad_w) {
      gmax = std::max(gmax, std::abs(g));
      gnorm2 += g * g;
    }
    if (gmax < config.tol) break;

    step = std::min(1.0, step * 2.0);
    bool accepted = false;
    Objective trial;
    double trial_b = 0.0;
    for (int h = 0; h < kMaxHalvings; ++h) {
      for (std::size_t j = 0; j < trial_w.size(); ++j) {
        trial_w[j] = fit.w[j] - step * current.grad_w[j];
      }
      trial_b = fit.b - step * current.grad_b;
      trial = objective(x, y, trial_w, trial_b, config.l2_lambda);
      if (trial.loss <= current.loss - kArmijo * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no representable descent step left
    fit.w = trial_w;
    fit.b = trial_b;
    current = std::move(trial);
    fit.loss_history.push_back(current.loss);
    fit.iterations = it + 1;
  }
  return fit;
}

}  // namespace logreg

TrainedModel train_logreg(const Dataset& data, const LogRegConfig& config,
                          std::vector<std::vector<double>>* loss_histories) {
  if (data.x.rows() != data.y.size()) throw ArgumentError("feature/label row count mismatch");
  check_finite(data.x);
  std::vector<std::size_t> counts(data.classes.size(), 0);
  for (int label : data.y) ++counts.at(static_cast<std::size_t>(label));
  if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) < 2) {
    throw TrainingError("logistic regression needs at least two classes in the labels");
  }

  LogRegParams params;
  params.standardizer = Standardizer::fit(data.x);
  const Matrix xs = params.standardizer.apply(data.x);
  const std::size_t problems = data.classes.size() == 2 ? 1 : data.classes.size();
  std::vector<double> target(data.size());
  for (std::size_t p = 0; p < problems; ++p) {
    const int positive = problems == 1 ? 1 : static_cast<int>(p);
    for (std::size_t i = 0; i < data.size(); ++i) target[i] = data.y[i] == positive ? 1.0 : 0.0;
    logreg::Fit fit = logreg::fit_binary(xs, target, config);
    params.weights.push_back(std::move(fit.w));
    params.bias.push_back(fit.b);
    if (loss_histories != nullptr) loss_histories->push_back(std::move(fit.loss_history));
  }

  TrainedModel model;
  model.kind = ModelKind::kLogReg;
  model.classes = data.classes;
  model.feature_names = data.feature_names;
  model.parameters = std::move(params);
  return model;
}

namespace detail {

void logreg_proba(const LogRegParams& p, std::span<const double> row, std::span<double> out) {
  std::vector<double> z(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) {
    z[c] = (row[c] - p.standardizer.mean[c]) / p.standardizer.scale[c];
  }
  if (p.weights.size() == 1) {
    const double s = sigmoid(dot(z, p.weights[0]) + p.bias[0]);
    out[0] = 1.0 - s;
    out[1] = s;
    return;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    out[k] = sigmoid(dot(z, p.weights[k]) + p.bias[k]);
    total += out[k];
  }
  if (total <= 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return;
  }
  for (double& v : out) v /= total;
}

}  // namespace detail
}  // namespace urcminer
