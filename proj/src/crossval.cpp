#include "urcminer/crossval.hpp"

#include <json.hpp>

#include "urcminer/rng.hpp"

namespace urcminer {

CvResult cross_validate(const Dataset& data, const TrainFn& train, int k, std::uint64_t seed) {
  const Rng root(seed);
  const std::vector<int> fold_of = stratified_folds(data.y, k, root.split("folds").next());
  CvResult result;
  double auc_sum = 0.0;
  std::size_t auc_folds = 0;
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
      (fold_of[i] == f ? test_rows : train_rows).push_back(i);
    }
    if (test_rows.empty()) throw ArgumentError("fold " + std::to_string(f) + " is empty");
    const Dataset train_data = data.subset(train_rows);
    const Dataset test_data = data.subset(test_rows);
    const TrainedModel model =
        train(train_data, root.split(static_cast<std::uint64_t>(f)).next());
    const Matrix proba = predict_proba(model, test_data.x);
    std::vector<int> predicted(test_rows.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) predicted[i] = argmax(proba.row(i));
    const EvalReport report =
        classification_report(test_data.y, predicted, data.classes, &proba);
    result.folds.push_back({test_rows.size(), report.accuracy, report.auc});
    result.mean_accuracy += report.accuracy;
    if (report.auc) {
      auc_sum += *report.auc;
      ++auc_folds;
    }
  }
  result.mean_accuracy /= static_cast<double>(k);
  if (auc_folds > 0) result.mean_auc = auc_sum / static_cast<double>(auc_folds);
  return result;
}

std::string cv_to_json(const CvResult& result) {
  nlohmann::json folds = nlohmann::json::array();
  for (const FoldResult& f : result.folds) {
    folds.push_back({{"n_test", f.n_test},
                     {"accuracy", f.accuracy},
                     {"auc", f.auc ? nlohmann::json(*f.auc) : nlohmann::json(nullptr)}});
  }
  nlohmann::json j{{"folds", folds},
                   {"mean_accuracy", result.mean_accuracy},
                   {"mean_auc", result.mean_auc ? nlohmann::json(*result.mean_auc)
                                                : nlohmann::json(nullptr)}};
  return j.dump(2);
}

}  // namespace urcminer
