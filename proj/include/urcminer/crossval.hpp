#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "urcminer/metrics.hpp"
#include "urcminer/models.hpp"

namespace urcminer {

struct FoldResult {
  std::size_t n_test = 0;
  double accuracy = 0.0;
  std::optional<double> auc;
};

struct CvResult {
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  std::optional<double> mean_auc;  // over folds where AUC was defined
};

// Stratified k-fold cross-validation. Fold assignment and the seed passed to
// `train` for each fold are both derived from `seed`.
CvResult cross_validate(const Dataset& data, const TrainFn& train, int k, std::uint64_t seed);

std::string cv_to_json(const CvResult& result);

}  // namespace urcminer
