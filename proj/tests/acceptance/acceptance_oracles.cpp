// Criteria 5-8: metric, gradient and density oracles plus determinism.
// Prints one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "urcminer/annotations.hpp"
#include "urcminer/corpus.hpp"
#include "urcminer/empirics.hpp"
#include "urcminer/features.hpp"
#include "urcminer/matrix_io.hpp"
#include "urcminer/metrics.hpp"
#include "urcminer/models.hpp"
#include "urcminer/rng.hpp"
#include "urcminer/text.hpp"
#include "urcminer/tfidf.hpp"

using namespace urcminer;

namespace {

constexpr double kAucTol = 1e-12;
constexpr double kGradTol = 1e-5;
constexpr double kFdStep = 1e-5;
constexpr double kGnbTol = 1e-9;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s  criterion %2d  %-38s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(const char* format, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), format, a, b);
  return buf;
}

double normal(Rng& rng) {
  const double u1 = std::max(rng.uniform(), 1e-300), u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// ---- 5 ----

void auc_oracle() {
  Rng rng(20240501);
  double worst = 0.0;
  int instances = 0;
  while (instances < 1000) {
    const std::size_t n = 2 + rng.uniform_index(199);
    const std::size_t levels = 1 + rng.uniform_index(10);  // few levels force ties
    std::vector<int> t(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = rng.uniform() < 0.4 ? 1 : 0;
      s[i] = static_cast<double>(rng.uniform_index(levels)) / static_cast<double>(levels);
    }
    if (std::count(t.begin(), t.end(), 1) == 0 || std::count(t.begin(), t.end(), 0) == 0) continue;
    double good = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!t[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (t[j]) continue;
        pairs += 1.0;
        good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
    }
    worst = std::max(worst, std::abs(auc(t, s) - good / pairs));
    ++instances;
  }
  report(5, "AUC vs pairwise brute force", worst <= kAucTol,
         fmt("1000 instances, max |diff| = %.3g (tol %.0e)", worst, kAucTol));
}

// ---- 6 ----

void logreg_gradient() {
  Rng rng(6);
  double worst = 0.0;
  bool monotone = true;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = 10 + rng.uniform_index(60);
    const std::size_t d = 1 + rng.uniform_index(8);
    Matrix x(n, d);
    std::vector<double> y(n), w(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) x(i, j) = normal(rng);
      y[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
    }
    y[0] = 0.0;
    y[1] = 1.0;
    for (double& v : w) v = normal(rng);
    const double b = normal(rng);
    const double lambda = rng.uniform() * 2.0;
    const auto obj = logreg::objective(x, y, w, b, lambda);

    std::vector<double> analytic = obj.grad_w, numeric;
    analytic.push_back(obj.grad_b);
    for (std::size_t j = 0; j <= d; ++j) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (j < d) {
        wp[j] += kFdStep;
        wm[j] -= kFdStep;
      } else {
        bp += kFdStep;
        bm -= kFdStep;
      }
      numeric.push_back((logreg::objective(x, y, wp, bp, lambda).loss -
                         logreg::objective(x, y, wm, bm, lambda).loss) / (2.0 * kFdStep));
    }
    double diff = 0.0, na = 0.0, nn = 0.0;
    for (std::size_t j = 0; j < analytic.size(); ++j) {
      diff += std::pow(analytic[j] - numeric[j], 2);
      na += analytic[j] * analytic[j];
      nn += numeric[j] * numeric[j];
    }
    worst = std::max(worst, std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-12}));

    const auto fit = logreg::fit_binary(x, y, {lambda, 200, 1e-9});
    for (std::size_t i = 1; i < fit.loss_history.size(); ++i) {
      monotone = monotone && fit.loss_history[i] <= fit.loss_history[i - 1];
    }
  }
  report(6, "LR gradient vs central differences", worst < kGradTol && monotone,
         fmt("20 instances, max rel err = %.3g (tol %.0e), loss non-increasing: ", worst, kGradTol) +
             (monotone ? "yes" : "no"));
}

// ---- 7 ----

void gnb_oracle() {
  Rng rng(7);
  double worst = 0.0;
  for (int set = 0; set < 50; ++set) {
    const std::size_t n = 6 + rng.uniform_index(30);
    Dataset data;
    data.classes = {"NO_URC", "URC"};
    data.feature_names = {"a", "b"};
    data.x = Matrix(n, 2);
    data.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      data.y[i] = i < 3 ? 0 : (i < 6 ? 1 : static_cast<int>(rng.uniform_index(2)));
      for (std::size_t j = 0; j < 2; ++j) data.x(i, j) = normal(rng) + 1.5 * data.y[i];
    }
    const TrainedModel model = train_gnb(data);

    // Oracle: priors, means and population variances from scratch, then
    // posterior = prior · Π N(x_j; μ, σ²) normalized over classes.
    double prior[2] = {0, 0}, mean[2][2] = {}, var[2][2] = {};
    for (std::size_t i = 0; i < n; ++i) {
      prior[data.y[i]] += 1;
      for (int j = 0; j < 2; ++j) mean[data.y[i]][j] += data.x(i, j);
    }
    for (int c = 0; c < 2; ++c)
      for (int j = 0; j < 2; ++j) mean[c][j] /= prior[c];
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) var[data.y[i]][j] += std::pow(data.x(i, j) - mean[data.y[i]][j], 2);
    for (int c = 0; c < 2; ++c)
      for (int j = 0; j < 2; ++j) var[c][j] /= prior[c];

    Matrix probe(20, 2);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < 2; ++j) probe(i, j) = normal(rng) * 1.5 + 0.75;
    const Matrix got = predict_proba(model, probe);
    for (std::size_t i = 0; i < 20; ++i) {
      double joint[2];
      for (int c = 0; c < 2; ++c) {
        joint[c] = prior[c] / static_cast<double>(n);
        for (int j = 0; j < 2; ++j) {
          const double z = probe(i, j) - mean[c][j];
          joint[c] *= std::exp(-z * z / (2.0 * var[c][j])) / std::sqrt(2.0 * std::numbers::pi * var[c][j]);
        }
      }
      const double total = joint[0] + joint[1];
      for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(got(i, c) - joint[c] / total));
    }
  }
  report(7, "GNB posterior vs density product", worst <= kGnbTol,
         fmt("50 two-feature sets, max |diff| = %.3g (tol %.0e)", worst, kGnbTol));
}

// ---- 8 ----

struct PipelineOutputs {
  std::vector<std::string> artifacts;
};

PipelineOutputs run_pipeline() {
  const std::filesystem::path dir = URCMINER_FIXTURE_DIR;
  const auto corpus = parse_dump({dir / "Posts.xml", dir / "Comments.xml", dir / "Users.xml",
                                  dir / "PostHistory.xml"});
  const auto threads = select_answers(corpus, "java", parse_timestamp("2017-01-01"));
  const auto annotated = load_annotations(dir / "annotations.csv", threads);

  PipelineOutputs out;
  std::ostringstream corpus_text;
  write_threads(corpus_text, threads);
  out.artifacts.push_back(corpus_text.str());

  const FeatureMatrix features = featurize_threads(threads, FeatureMode::kDeploy, nullptr, 4);
  const LabeledMatrix m = features.to_labeled();
  std::vector<std::string> labels;
  const auto classes = class_names(ClassScheme::kBinary);
  for (long long id : m.ids) {
    const auto it = std::find_if(annotated.begin(), annotated.end(),
                                 [&](const AnnotatedComment& a) { return a.comment_id == id; });
    labels.push_back(classes[static_cast<std::size_t>(class_index(*it, ClassScheme::kBinary))]);
  }
  std::ostringstream matrix_text;
  write_matrix_csv(matrix_text, MatrixFile{{{"kind", "features"}}, m, labels});
  out.artifacts.push_back(matrix_text.str());

  const Dataset data = make_dataset(m, labels, classes);
  const auto [train_rows, holdout_rows] = stratified_split(data.y, 0.2, Rng(0).split("validation").next());
  const TrainFn train = [](const Dataset& d, std::uint64_t seed) {
    return train_rforest(d, {30, 4}, seed);
  };
  const ProtocolResult r =
      median_protocol(train, data.subset(train_rows), data.subset(holdout_rows), 5, 0);
  out.artifacts.push_back(model_to_json(r.model));

  std::string preds;
  for (const Prediction& p : predict(r.model, m)) {
    preds += std::to_string(p.comment_id) + ":" + std::to_string(p.predicted_class);
    for (double v : p.class_probabilities) preds += "," + format_double(v);
    preds += "\n";
  }
  out.artifacts.push_back(preds);

  std::vector<std::string> texts;
  for (const auto& t : threads)
    for (const auto& c : t.comments) texts.push_back(c.text);
  const Vocabulary vocab = fit_vocabulary(texts, default_stopwords(), 1);
  out.artifacts.push_back(vocabulary_to_json(vocab));
  out.artifacts.push_back(empirics_to_json(compute_empirics(annotated, threads)));
  return out;
}

void determinism() {
  const PipelineOutputs a = run_pipeline();
  const PipelineOutputs b = run_pipeline();
  bool same = a.artifacts == b.artifacts;

  // Forest bytes must not depend on the thread count either.
  Rng rng(8);
  Dataset d;
  d.classes = {"NO_URC", "URC"};
  d.feature_names = {"a", "b", "c"};
  d.x = Matrix(200, 3);
  for (std::size_t i = 0; i < 200; ++i) {
    d.y.push_back(static_cast<int>(i % 2));
    for (std::size_t j = 0; j < 3; ++j) d.x(i, j) = normal(rng) + d.y.back();
  }
  const std::string one = model_to_json(train_rforest(d, {40, 1}, 99));
  const std::string many = model_to_json(train_rforest(d, {40, 8}, 99));
  const bool threads_ok = one == many;
  report(8, "determinism", same && threads_ok,
         std::string("two pipeline runs identical: ") + (same ? "yes" : "no") +
             ", RF jobs=1 vs jobs=8 identical: " + (threads_ok ? "yes" : "no"));
}

}  // namespace

int main() {
  auc_oracle();
  logreg_gradient();
  gnb_oracle();
  determinism();
  return failures == 0 ? 0 : 1;
}
