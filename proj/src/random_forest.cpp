#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <numeric>

#include "model_detail.hpp"
#include "urcminer/models.hpp"
#include "urcminer/rng.hpp"

namespace urcminer {
namespace {

double gini(std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double s = 1.0;
  for (double c : counts) {
    const double p = c / total;
    s -= p * p;
  }
  return s;
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child impurity
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, std::size_t max_features, std::uint64_t seed)
      : data_(data), k_(data.classes.size()), max_features_(max_features), rng_(seed) {}

  DecisionTree build(std::vector<std::size_t> sample) {
    DecisionTree tree;
    struct Pending {
      int node;
      std::vector<std::size_t> rows;
    };
    tree.nodes.emplace_back();
    std::vector<Pending> stack;
    stack.push_back({0, std::move(sample)});
    while (!stack.empty()) {
      Pending job = std::move(stack.back());
      stack.pop_back();
      std::vector<double> counts(k_, 0.0);
      for (std::size_t r : job.rows) counts[static_cast<std::size_t>(data_.y[r])] += 1.0;
      const bool pure =
          std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
      std::optional<Split> split;
      if (!pure && job.rows.size() >= 2) split = best_split(job.rows, counts);
      if (!split) {
        tree.nodes[static_cast<std::size_t>(job.node)].counts = std::move(counts);
        continue;
      }
      std::vector<std::size_t> left, right;
      for (std::size_t r : job.rows) {
        (data_.x(r, static_cast<std::size_t>(split->feature)) <= split->threshold ? left : right)
            .push_back(r);
      }
      const int left_id = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      const int right_id = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[static_cast<std::size_t>(job.node)];
      node.feature = split->feature;
      node.threshold = split->threshold;
      node.left = left_id;
      node.right = right_id;
      // Right pushed first so the left subtree is expanded first.
      stack.push_back({right_id, std::move(right)});
      stack.push_back({left_id, std::move(left)});
    }
    return tree;
  }

 private:
  // Draws features in random order and evaluates the first `max_features`
  // that are not constant within the node.
  std::optional<Split> best_split(const std::vector<std::size_t>& rows,
                                  const std::vector<double>& counts) {
    const std::size_t d = data_.x.cols();
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), 0);
    std::optional<Split> best;
    std::size_t evaluated = 0;
    std::vector<std::pair<double, int>> values(rows.size());
    for (std::size_t i = 0; i < d && evaluated < max_features_; ++i) {
      const std::size_t pick = i + rng_.uniform_index(d - i);
      std::swap(features[i], features[pick]);
      const std::size_t f = features[i];
      for (std::size_t r = 0; r < rows.size(); ++r) {
        values[r] = {data_.x(rows[r], f), data_.y[rows[r]]};
      }
      std::sort(values.begin(), values.end());
      if (values.front().first == values.back().first) continue;
      ++evaluated;
      scan_feature(static_cast<int>(f), values, counts, best);
    }
    return best;
  }

  void scan_feature(int feature, const std::vector<std::pair<double, int>>& values,
                    const std::vector<double>& counts, std::optional<Split>& best) const {
    const auto n = static_cast<double>(values.size());
    std::vector<double> left(k_, 0.0);
    std::vector<double> right = counts;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const auto c = static_cast<std::size_t>(values[i].second);
      left[c] += 1.0;
      right[c] -= 1.0;
      const double a = values[i].first;
      const double b = values[i + 1].first;
      if (a == b) continue;
      const auto nl = static_cast<double>(i + 1);
      const double nr = n - nl;
      const double impurity = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
      if (!best || impurity < best->impurity) {
        double threshold = a + (b - a) / 2.0;
        if (!(threshold < b)) threshold = a;
        best = Split{feature, threshold, impurity};
      }
    }
  }

  const Dataset& data_;
  std::size_t k_;
  std::size_t max_features_;
  Rng rng_;
};

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const {
  const TreeNode* node = &nodes.front();
  while (node->feature >= 0) {
    node = &nodes[static_cast<std::size_t>(
        row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                         : node->right)];
  }
  return *node;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> depth(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (nodes[i].feature >= 0) {
      depth[static_cast<std::size_t>(nodes[i].left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(nodes[i].right)] = depth[i] + 1;
    }
  }
  return deepest;
}

DecisionTree grow_tree(const Dataset& data, std::span<const std::size_t> sample,
                       std::size_t max_features, std::uint64_t seed) {
  TreeBuilder builder(data, std::max<std::size_t>(1, max_features), seed);
  return builder.build({sample.begin(), sample.end()});
}

TrainedModel train_rforest(const Dataset& data, const ForestConfig& config, std::uint64_t seed) {
  if (data.size() == 0) throw TrainingError("random forest needs at least one training row");
  if (data.x.rows() != data.y.size()) throw ArgumentError("feature/label row count mismatch");
  if (config.n_trees < 1) throw ArgumentError("n_trees must be at least 1");
  for (double v : data.x.data()) {
    if (std::isnan(v)) throw TrainingError("feature matrix contains NaN");
  }
  const std::size_t n = data.size();
  const auto max_features = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(data.x.cols())))));
  const Rng root(seed);

  ForestParams params;
  params.trees.resize(static_cast<std::size_t>(config.n_trees));
  auto build = [&](std::size_t t) {
    Rng rng = root.split(t);
    std::vector<std::size_t> sample(n);
    for (std::size_t& s : sample) s = rng.uniform_index(n);
    params.trees[t] = grow_tree(data, sample, max_features, rng.next());
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, params.trees.size()));
  if (jobs == 1) {
    for (std::size_t t = 0; t < params.trees.size(); ++t) build(t);
  } else {
    std::vector<std::future<void>> workers;
    for (unsigned w = 0; w < jobs; ++w) {
      workers.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t t = w; t < params.trees.size(); t += jobs) build(t);
      }));
    }
    for (auto& f : workers) f.get();
  }

  TrainedModel model;
  model.kind = ModelKind::kRandomForest;
  model.classes = data.classes;
  model.feature_names = data.feature_names;
  model.seed = seed;
  model.parameters = std::move(params);
  return model;
}

namespace detail {

void forest_proba(const ForestParams& p, std::span<const double> row, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const DecisionTree& tree : p.trees) {
    const TreeNode& leaf = tree.leaf_for(row);
    double total = 0.0;
    for (double c : leaf.counts) total += c;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += leaf.counts[k] / total;
  }
  for (double& v : out) v /= static_cast<double>(p.trees.size());
}

}  // namespace detail
}  // namespace urcminer
