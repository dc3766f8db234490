#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "urcminer/common.hpp"
#include "urcminer/matrix.hpp"

namespace urcminer {

enum class ModelKind { kLogReg, kGnb, kRandomForest };

std::string_view to_string(ModelKind kind);
// Accepts logreg|lr, gnb|nb, rforest|rf.
ModelKind parse_model_kind(std::string_view text);

// Training input: y[i] indexes into classes.
struct Dataset {
  Matrix x;
  std::vector<int> y;
  std::vector<std::string> classes;
  std::vector<std::string> feature_names;

  std::size_t size() const { return y.size(); }
  Dataset subset(std::span<const std::size_t> rows) const;
};

// Builds a Dataset from a labeled matrix and per-row class names. Throws
// ValidationError on a label outside `classes`.
Dataset make_dataset(const LabeledMatrix& m, std::span<const std::string> labels,
                     std::vector<std::string> classes);

struct LogRegConfig {
  double l2_lambda = 1.0;
  int max_iter = 1000;
  double tol = 1e-6;
};

struct GnbConfig {
  double var_smoothing = 1e-9;
};

struct ForestConfig {
  int n_trees = 100;
  unsigned jobs = 1;  // worker threads; results do not depend on it
};

// z-score parameters from training data. Zero-variance columns keep mean 0
// and scale 1, i.e. pass through unscaled.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

struct LogRegParams {
  Standardizer standardizer;
  // One row per one-vs-rest problem; a single row for binary tasks, scoring
  // classes[1] against classes[0].
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
};

struct GnbParams {
  std::vector<double> priors;
  std::vector<std::vector<double>> means;      // [class][feature]
  std::vector<std::vector<double>> variances;  // [class][feature], smoothed
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x[feature] <= threshold goes left
  int left = -1;
  int right = -1;
  std::vector<double> counts;  // leaf class counts (bootstrap-weighted)
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> row) const;
  std::size_t depth() const;
};

struct ForestParams {
  std::vector<DecisionTree> trees;
};

struct TrainedModel {
  ModelKind kind = ModelKind::kLogReg;
  std::vector<std::string> classes;
  std::vector<std::string> feature_names;
  std::optional<std::uint64_t> seed;
  std::variant<LogRegParams, GnbParams, ForestParams> parameters;
};

struct Prediction {
  long long comment_id = 0;
  std::vector<double> class_probabilities;  // aligned with model.classes
  int predicted_class = 0;                  // argmax, ties to the lower index
};

namespace logreg {

struct Objective {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

// Mean negative log-likelihood plus (lambda / 2n)·‖w‖²; the bias is not
// penalized. y holds 0/1 targets.
Objective objective(const Matrix& x, std::span<const double> y, std::span<const double> w,
                    double b, double lambda);

struct Fit {
  std::vector<double> w;
  double b = 0.0;
  std::vector<double> loss_history;  // loss at every accepted iterate, starting at w = 0
  int iterations = 0;
};

// Full-batch gradient descent with Armijo backtracking, on already
// standardized inputs.
Fit fit_binary(const Matrix& x, std::span<const double> y, const LogRegConfig& config);

}  // namespace logreg

// When `loss_histories` is given it receives one history per problem.
TrainedModel train_logreg(const Dataset& data, const LogRegConfig& config = {},
                          std::vector<std::vector<double>>* loss_histories = nullptr);
TrainedModel train_gnb(const Dataset& data, const GnbConfig& config = {});
TrainedModel train_rforest(const Dataset& data, const ForestConfig& config, std::uint64_t seed);

// Single CART tree on the rows listed in `sample` (duplicates allowed),
// sampling `max_features` candidate features per split.
DecisionTree grow_tree(const Dataset& data, std::span<const std::size_t> sample,
                       std::size_t max_features, std::uint64_t seed);

// Probabilities per row; columns follow model.classes. No schema check.
Matrix predict_proba(const TrainedModel& model, const Matrix& x);

// Checks the matrix columns against model.feature_names first; throws
// SchemaError naming the first differing column.
std::vector<Prediction> predict(const TrainedModel& model, const LabeledMatrix& m);

int argmax(std::span<const double> probabilities);
double accuracy(const TrainedModel& model, const Dataset& data);

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(std::string_view text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

// ---- run protocol ----

using TrainFn = std::function<TrainedModel(const Dataset& train, std::uint64_t seed)>;
using AccuracyFn = std::function<double(const TrainedModel& model, const Dataset& validation)>;

struct ProtocolResult {
  TrainedModel model;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  std::vector<double> accuracies;  // per seed, base_seed + i
};

// Trains k models with seeds base_seed .. base_seed+k-1 and returns the one
// whose validation accuracy is the median (lower middle for even k); among
// equal accuracies the lowest seed wins. Only the winner is kept in memory:
// it is retrained from its seed, so `train` must be deterministic.
ProtocolResult median_protocol(const TrainFn& train, const Dataset& train_data,
                               const Dataset& validation, int k, std::uint64_t base_seed,
                               const AccuracyFn& score = {});

// Index of the selected run given per-run accuracies.
std::size_t median_index(std::span<const double> accuracies);

// Row indices for a stratified holdout: roughly `fraction` of each class
// goes to the second vector.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const int> y, double fraction, std::uint64_t seed);

// Fold id (0..k-1) per row, stratified by class.
std::vector<int> stratified_folds(std::span<const int> y, int k, std::uint64_t seed);

}  // namespace urcminer
