#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urcminer/matrix.hpp"

namespace urcminer {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  // Set when a ratio had a zero denominator and was reported as 0.
  bool zero_division = false;
};

struct EvalReport {
  std::vector<std::string> classes;
  double accuracy = 0.0;
  std::optional<double> auc;  // binary AUC, or macro one-vs-rest for 3+ classes
  std::vector<ClassMetrics> per_class;            // aligned with classes
  std::vector<std::vector<std::size_t>> confusion;  // [truth][predicted]
  std::size_t n = 0;
};

// Mann-Whitney AUC with average ranks for ties. Throws UndefinedMetricError
// unless both classes are present.
double auc(std::span<const int> truth_binary, std::span<const double> scores);

// Precision, recall, F1, accuracy and confusion matrix. When `probabilities`
// (rows aligned with truth, columns with classes) is supplied the AUC is
// added; it is skipped silently if a class is missing from `truth`.
EvalReport classification_report(std::span<const int> truth, std::span<const int> predicted,
                                  std::vector<std::string> classes,
                                  const Matrix* probabilities = nullptr);

std::string report_to_json(const EvalReport& report);
// Category / Precision / Recall / F1-score table plus accuracy and AUC lines.
std::string report_to_text(const EvalReport& report, std::string_view title = {});

}  // namespace urcminer
