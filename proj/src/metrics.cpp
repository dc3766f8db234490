#include "urcminer/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "urcminer/common.hpp"

namespace urcminer {

double auc(std::span<const int> truth, std::span<const double> scores) {
  if (truth.size() != scores.size()) throw ArgumentError("truth and scores differ in length");
  const std::size_t n = truth.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // ranks i+1 .. j share their mean
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (truth[order[k]] != 0) {
        rank_sum += rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetricError("AUC needs both positive and negative instances");
  }
  const auto p = static_cast<double>(positives);
  const auto q = static_cast<double>(negatives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

EvalReport classification_report(std::span<const int> truth, std::span<const int> predicted,
                                  std::vector<std::string> classes, const Matrix* probabilities) {
  if (truth.size() != predicted.size()) {
    throw ArgumentError("truth has " + std::to_string(truth.size()) + " entries, predictions " +
                        std::to_string(predicted.size()));
  }
  const std::size_t k = classes.size();
  EvalReport r;
  r.classes = std::move(classes);
  r.n = truth.size();
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || static_cast<std::size_t>(truth[i]) >= k || predicted[i] < 0 ||
        static_cast<std::size_t>(predicted[i]) >= k) {
      throw ArgumentError("class index out of range at row " + std::to_string(i));
    }
    ++r.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
  }
  std::size_t correct = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t tp = r.confusion[c][c];
    correct += tp;
    std::size_t predicted_c = 0, actual_c = 0;
    for (std::size_t o = 0; o < k; ++o) {
      predicted_c += r.confusion[o][c];
      actual_c += r.confusion[c][o];
    }
    ClassMetrics m;
    m.support = actual_c;
    if (predicted_c > 0) m.precision = static_cast<double>(tp) / static_cast<double>(predicted_c);
    else m.zero_division = true;
    if (actual_c > 0) m.recall = static_cast<double>(tp) / static_cast<double>(actual_c);
    else m.zero_division = true;
    if (m.precision + m.recall > 0.0) {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    r.per_class.push_back(m);
  }
  r.accuracy = r.n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(r.n);

  if (probabilities != nullptr && probabilities->rows() == truth.size() &&
      probabilities->cols() == k) {
    auto column = [&](std::size_t c) {
      std::vector<double> s(truth.size());
      for (std::size_t i = 0; i < truth.size(); ++i) s[i] = (*probabilities)(i, c);
      return s;
    };
    auto one_vs_rest = [&](std::size_t c) {
      std::vector<int> t(truth.size());
      for (std::size_t i = 0; i < truth.size(); ++i) t[i] = truth[i] == static_cast<int>(c);
      return t;
    };
    try {
      if (k == 2) {
        r.auc = auc(one_vs_rest(1), column(1));
      } else {
        double total = 0.0;
        for (std::size_t c = 0; c < k; ++c) total += auc(one_vs_rest(c), column(c));
        r.auc = total / static_cast<double>(k);
      }
    } catch (const UndefinedMetricError&) {
      r.auc.reset();
    }
  }
  return r;
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["accuracy"] = r.accuracy;
  j["auc"] = r.auc ? nlohmann::json(*r.auc) : nlohmann::json(nullptr);
  nlohmann::json per_class = nlohmann::json::object();
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const ClassMetrics& m = r.per_class[c];
    per_class[r.classes[c]] = {{"precision", m.precision},
                               {"recall", m.recall},
                               {"f1", m.f1},
                               {"support", m.support},
                               {"zero_division", m.zero_division}};
  }
  j["per_class"] = std::move(per_class);
  j["classes"] = r.classes;
  j["confusion"] = r.confusion;
  return j.dump(2);
}

std::string report_to_text(const EvalReport& r, std::string_view title) {
  std::ostringstream out;
  std::size_t width = 8;
  for (const auto& c : r.classes) width = std::max(width, c.size());
  char buf[256];
  if (!title.empty()) out << title << '\n';
  std::snprintf(buf, sizeof(buf), "%-*s  %9s  %6s  %8s  %7s\n", static_cast<int>(width),
                "Category", "Precision", "Recall", "F1-score", "Support");
  out << buf;
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const ClassMetrics& m = r.per_class[c];
    std::snprintf(buf, sizeof(buf), "%-*s  %9.3f  %6.3f  %8.3f  %7zu%s\n", static_cast<int>(width),
                  r.classes[c].c_str(), m.precision, m.recall, m.f1, m.support,
                  m.zero_division ? "  *" : "");
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "Accuracy: %.1f%%\n", 100.0 * r.accuracy);
  out << buf;
  if (r.auc) {
    std::snprintf(buf, sizeof(buf), "AUC: %.3f\n", *r.auc);
    out << buf;
  }
  if (std::any_of(r.per_class.begin(), r.per_class.end(),
                  [](const ClassMetrics& m) { return m.zero_division; })) {
    out << "* zero denominator, reported as 0\n";
  }
  return out.str();
}

}  // namespace urcminer
