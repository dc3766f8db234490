#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "model_detail.hpp"
#include "urcminer/models.hpp"

namespace urcminer {

TrainedModel train_gnb(const Dataset& data, const GnbConfig& config) {
  if (data.x.rows() != data.y.size()) throw ArgumentError("feature/label row count mismatch");
  const std::size_t k = data.classes.size();
  const std::size_t d = data.x.cols();
  const auto n = static_cast<double>(data.size());

  GnbParams p;
  p.priors.assign(k, 0.0);
  p.means.assign(k, std::vector<double>(d, 0.0));
  p.variances.assign(k, std::vector<double>(d, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto c = static_cast<std::size_t>(data.y[i]);
    ++counts.at(c);
    const auto row = data.x.row(i);
    for (std::size_t j = 0; j < d; ++j) p.means[c][j] += row[j];
  }
  if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) < 2) {
    throw TrainingError("naive Bayes needs at least two classes in the labels");
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (double& m : p.means[c]) m /= static_cast<double>(counts[c]);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto c = static_cast<std::size_t>(data.y[i]);
    const auto row = data.x.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = row[j] - p.means[c][j];
      p.variances[c][j] += diff * diff;
    }
  }

  // Floor: var_smoothing times the largest per-feature variance of the
  // whole training set.
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) mean += data.x(i, j);
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) var += (data.x(i, j) - mean) * (data.x(i, j) - mean);
    max_var = std::max(max_var, var / n);
  }
  double floor = config.var_smoothing * max_var;
  if (!(floor > 0.0)) floor = config.var_smoothing > 0.0 ? config.var_smoothing : 1e-300;

  for (std::size_t c = 0; c < k; ++c) {
    p.priors[c] = static_cast<double>(counts[c]) / n;
    for (std::size_t j = 0; j < d; ++j) {
      double& v = p.variances[c][j];
      v = counts[c] == 0 ? 1.0 : v / static_cast<double>(counts[c]);
      v = std::max(v, floor);
    }
  }

  TrainedModel model;
  model.kind = ModelKind::kGnb;
  model.classes = data.classes;
  model.feature_names = data.feature_names;
  model.parameters = std::move(p);
  return model;
}

namespace detail {

void gnb_proba(const GnbParams& p, std::span<const double> row, std::span<double> out) {
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < p.priors.size(); ++c) {
    if (p.priors[c] <= 0.0) {
      out[c] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double ll = std::log(p.priors[c]);
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double v = p.variances[c][j];
      const double diff = row[j] - p.means[c][j];
      ll -= 0.5 * (log_2pi + std::log(v) + diff * diff / v);
    }
    out[c] = ll;
    best = std::max(best, ll);
  }
  double total = 0.0;
  for (double& v : out) {
    v = std::isinf(v) ? 0.0 : std::exp(v - best);
    total += v;
  }
  for (double& v : out) v /= total;
}

}  // namespace detail
}  // namespace urcminer
