#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>

#include <json.hpp>

#include "model_detail.hpp"
#include "urcminer/models.hpp"
#include "urcminer/rng.hpp"

namespace urcminer {
namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;

json tree_node_to_json(const DecisionTree& tree, std::size_t index) {
  const TreeNode& node = tree.nodes[index];
  if (node.feature < 0) return json{{"counts", node.counts}};
  return json{{"feature", node.feature},
              {"threshold", node.threshold},
              {"left", tree_node_to_json(tree, static_cast<std::size_t>(node.left))},
              {"right", tree_node_to_json(tree, static_cast<std::size_t>(node.right))}};
}

int tree_node_from_json(const json& j, DecisionTree& tree) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("counts")) {
    tree.nodes.back().counts = j.at("counts").get<std::vector<double>>();
    return id;
  }
  const int feature = j.at("feature").get<int>();
  const double threshold = j.at("threshold").get<double>();
  const int left = tree_node_from_json(j.at("left"), tree);
  const int right = tree_node_from_json(j.at("right"), tree);
  TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
  node.feature = feature;
  node.threshold = threshold;
  node.left = left;
  node.right = right;
  return id;
}

void check_columns(const TrainedModel& model, std::span<const std::string> columns) {
  const std::size_t n = std::max(model.feature_names.size(), columns.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string expected = i < model.feature_names.size() ? model.feature_names[i] : "<none>";
    const std::string actual = i < columns.size() ? columns[i] : "<none>";
    if (expected != actual) {
      throw SchemaError("column " + std::to_string(i) + " is '" + actual + "', model expects '" +
                        expected + "'");
    }
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogReg: return "logreg";
    case ModelKind::kGnb: return "gnb";
    case ModelKind::kRandomForest: return "rforest";
  }
  return "";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "logreg" || text == "lr") return ModelKind::kLogReg;
  if (text == "gnb" || text == "nb") return ModelKind::kGnb;
  if (text == "rforest" || text == "rf") return ModelKind::kRandomForest;
  throw ArgumentError("unknown model kind '" + std::string(text) + "' (logreg|gnb|rforest)");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.x = x.select_rows(rows);
  out.y.reserve(rows.size());
  for (std::size_t r : rows) out.y.push_back(y[r]);
  out.classes = classes;
  out.feature_names = feature_names;
  return out;
}

Dataset make_dataset(const LabeledMatrix& m, std::span<const std::string> labels,
                     std::vector<std::string> classes) {
  if (labels.size() != m.values.rows()) {
    throw ValidationError("have " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(m.values.rows()) + " rows");
  }
  Dataset d;
  d.x = m.values;
  d.feature_names = m.columns;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find(classes.begin(), classes.end(), labels[i]);
    if (it == classes.end()) {
      throw ValidationError("label '" + labels[i] + "' of row " + std::to_string(i + 1) +
                            " is not one of the model classes");
    }
    d.y.push_back(static_cast<int>(it - classes.begin()));
  }
  d.classes = std::move(classes);
  return d;
}

Matrix predict_proba(const TrainedModel& model, const Matrix& x) {
  if (x.rows() > 0 && x.cols() != model.feature_names.size()) {
    throw SchemaError("matrix has " + std::to_string(x.cols()) + " columns, model expects " +
                      std::to_string(model.feature_names.size()));
  }
  Matrix out(x.rows(), model.classes.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, LogRegParams>) detail::logreg_proba(p, x.row(r), out.row(r));
          else if constexpr (std::is_same_v<P, GnbParams>) detail::gnb_proba(p, x.row(r), out.row(r));
          else detail::forest_proba(p, x.row(r), out.row(r));
        },
        model.parameters);
  }
  return out;
}

int argmax(std::span<const double> probabilities) {
  return static_cast<int>(std::max_element(probabilities.begin(), probabilities.end()) -
                          probabilities.begin());
}

std::vector<Prediction> predict(const TrainedModel& model, const LabeledMatrix& m) {
  check_columns(model, m.columns);
  const Matrix proba = predict_proba(model, m.values);
  std::vector<Prediction> out;
  out.reserve(proba.rows());
  for (std::size_t r = 0; r < proba.rows(); ++r) {
    const auto row = proba.row(r);
    out.push_back(Prediction{m.ids[r], {row.begin(), row.end()}, argmax(row)});
  }
  return out;
}

double accuracy(const TrainedModel& model, const Dataset& data) {
  if (data.size() == 0) throw ArgumentError("accuracy of an empty dataset is undefined");
  const Matrix proba = predict_proba(model, data.x);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < proba.rows(); ++r) {
    if (argmax(proba.row(r)) == data.y[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

// ---- persistence ----

std::string model_to_json(const TrainedModel& model) {
  json j;
  j["format"] = "urcminer-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = to_string(model.kind);
  j["classes"] = model.classes;
  j["feature_names"] = model.feature_names;
  j["seed"] = model.seed ? json(*model.seed) : json(nullptr);
  json params;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LogRegParams>) {
          params["mean"] = p.standardizer.mean;
          params["scale"] = p.standardizer.scale;
          params["weights"] = p.weights;
          params["bias"] = p.bias;
        } else if constexpr (std::is_same_v<P, GnbParams>) {
          params["priors"] = p.priors;
          params["means"] = p.means;
          params["variances"] = p.variances;
        } else {
          json trees = json::array();
          for (const DecisionTree& t : p.trees) trees.push_back(tree_node_to_json(t, 0));
          params["trees"] = std::move(trees);
        }
      },
      model.parameters);
  j["parameters"] = std::move(params);
  return j.dump();
}

TrainedModel model_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "urcminer-model") {
      throw ValidationError("not a urcminer model file");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw ValidationError("unsupported model format version " +
                            std::to_string(j.at("version").get<int>()));
    }
    TrainedModel m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    const json& p = j.at("parameters");
    switch (m.kind) {
      case ModelKind::kLogReg: {
        LogRegParams lr;
        lr.standardizer.mean = p.at("mean").get<std::vector<double>>();
        lr.standardizer.scale = p.at("scale").get<std::vector<double>>();
        lr.weights = p.at("weights").get<std::vector<std::vector<double>>>();
        lr.bias = p.at("bias").get<std::vector<double>>();
        m.parameters = std::move(lr);
        break;
      }
      case ModelKind::kGnb: {
        GnbParams g;
        g.priors = p.at("priors").get<std::vector<double>>();
        g.means = p.at("means").get<std::vector<std::vector<double>>>();
        g.variances = p.at("variances").get<std::vector<std::vector<double>>>();
        m.parameters = std::move(g);
        break;
      }
      case ModelKind::kRandomForest: {
        ForestParams f;
        for (const json& jt : p.at("trees")) {
          DecisionTree t;
          tree_node_from_json(jt, t);
          f.trees.push_back(std::move(t));
        }
        m.parameters = std::move(f);
        break;
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad model file: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << model_to_json(model) << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return model_from_json(std::string(std::istreambuf_iterator<char>(in), {}));
}

// ---- protocol ----

std::size_t median_index(std::span<const double> accuracies) {
  if (accuracies.empty()) throw ArgumentError("no runs to choose from");
  std::vector<double> sorted(accuracies.begin(), accuracies.end());
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[(sorted.size() - 1) / 2];
  return static_cast<std::size_t>(
      std::find(accuracies.begin(), accuracies.end(), median) - accuracies.begin());
}

ProtocolResult median_protocol(const TrainFn& train, const Dataset& train_data,
                               const Dataset& validation, int k, std::uint64_t base_seed,
                               const AccuracyFn& score) {
  if (validation.size() == 0) throw ArgumentError("median protocol needs a non-empty validation set");
  if (k < 1) throw ArgumentError("median protocol needs k >= 1");
  const AccuracyFn eval = score ? score : AccuracyFn([](const TrainedModel& m, const Dataset& v) {
    return accuracy(m, v);
  });
  ProtocolResult result;
  for (int i = 0; i < k; ++i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    result.accuracies.push_back(eval(train(train_data, seed), validation));
  }
  const std::size_t pick = median_index(result.accuracies);
  result.seed = base_seed + pick;
  result.accuracy = result.accuracies[pick];
  result.model = train(train_data, result.seed);
  return result;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const int> y, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ArgumentError("holdout fraction must be in (0, 1)");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
  Rng rng(seed);
  std::vector<std::size_t> keep, holdout;
  for (auto& [label, rows] : by_class) {
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.uniform_index(i)]);
    const auto n_out = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(rows.size())));
    holdout.insert(holdout.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_out));
    keep.insert(keep.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_out), rows.end());
  }
  std::sort(keep.begin(), keep.end());
  std::sort(holdout.begin(), holdout.end());
  return {keep, holdout};
}

std::vector<int> stratified_folds(std::span<const int> y, int k, std::uint64_t seed) {
  if (k < 2) throw ArgumentError("need at least two folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
  Rng rng(seed);
  std::vector<int> fold(y.size(), 0);
  int next = 0;
  for (auto& [label, rows] : by_class) {
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.uniform_index(i)]);
    for (std::size_t r : rows) {
      fold[r] = next;
      next = (next + 1) % k;
    }
  }
  return fold;
}

}  // namespace urcminer
