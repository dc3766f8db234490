// urcminer command-line tool: one subcommand per pipeline stage.
//
// Exit codes: 0 success, 1 data or validation error, 2 usage error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "urcminer/annotations.hpp"
#include "urcminer/common.hpp"
#include "urcminer/corpus.hpp"
#include "urcminer/crossval.hpp"
#include "urcminer/empirics.hpp"
#include "urcminer/features.hpp"
#include "urcminer/manifest.hpp"
#include "urcminer/matrix_io.hpp"
#include "urcminer/metrics.hpp"
#include "urcminer/models.hpp"
#include "urcminer/rng.hpp"
#include "urcminer/text.hpp"
#include "urcminer/tfidf.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace urcminer;

namespace {

// Flag combinations CLI11 cannot express; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Collects inputs, config and outputs of one invocation. Outputs are held in
// memory until commit(), so a failing run writes nothing.
class Run {
 public:
  explicit Run(std::string subcommand) {
    manifest_.version = std::string(kVersion);
    manifest_.subcommand = std::move(subcommand);
  }

  // Inputs are read twice (digest, then parse), so pipes are refused.
  void input(const std::string& path) {
    if (std::filesystem::exists(path) && !std::filesystem::is_regular_file(path)) {
      throw UsageError(path + " is not a regular file");
    }
    manifest_.inputs.push_back({path, sha256_file(path)});
  }

  template <typename T>
  void config(const std::string& key, const T& value) {
    std::ostringstream s;
    s << value;
    manifest_.config[key] = s.str();
  }
  void config(const std::string& key, double value) { manifest_.config[key] = format_double(value); }

  void seed(const std::string& name, std::uint64_t value) { manifest_.seeds[name] = value; }

  void output(const std::string& path, std::string content) {
    pending_.emplace_back(path, std::move(content));
  }

  void commit() {
    for (const auto& [path, content] : pending_) {
      manifest_.outputs.push_back({path, sha256_hex(content)});
    }
    for (const auto& [path, content] : pending_) atomic_write(path, content);
    const std::string record = manifest_.to_json();
    for (const auto& [path, content] : pending_) atomic_write(manifest_path_for(path), record);
  }

 private:
  Manifest manifest_;
  std::vector<std::pair<std::string, std::string>> pending_;
};

// Prints `text` to stdout, or queues it as an output file when --out is set.
void emit(Run& run, const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    run.output(out, text.back() == '\n' ? text : text + "\n");
  }
}

ClassScheme scheme_from(int classes) {
  return classes == 3 ? ClassScheme::kThreeClass : ClassScheme::kBinary;
}

std::vector<AnswerThread> read_corpus(Run& run, const std::string& path) {
  run.input(path);
  return read_threads(fs::path(path));
}

std::vector<AnnotatedComment> read_annotations(Run& run, const std::string& path,
                                               std::span<const AnswerThread> threads) {
  run.input(path);
  return load_annotations(fs::path(path), threads);
}

std::string labels_csv(std::span<const long long> ids, std::span<const std::string> labels) {
  std::string out = "comment_id,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += std::to_string(ids[i]) + "," + labels[i] + "\n";
  }
  return out;
}

std::map<long long, std::string> read_labels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  const auto rows = read_csv(in);
  if (rows.empty() || rows[0].size() != 2 || rows[0][0] != "comment_id" || rows[0][1] != "label") {
    throw SchemaError(path + ": expected header 'comment_id,label'");
  }
  std::map<long long, std::string> labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) {
      throw ParseError(path + ": expected 2 fields", r + 1);
    }
    long long id = 0;
    try {
      id = std::stoll(rows[r][0]);
    } catch (const std::exception&) {
      throw ParseError(path + ": bad comment_id '" + rows[r][0] + "'", r + 1);
    }
    if (!labels.emplace(id, rows[r][1]).second) {
      throw ValidationError(path + ": duplicate comment_id " + rows[r][0]);
    }
  }
  return labels;
}

// Model input assembled from a feature file, a TF-IDF file, or both.
struct ModelInput {
  LabeledMatrix matrix;
  std::vector<std::string> labels;  // empty when no labels are available
  std::string feature_mode;         // mode of the feature block, if any
};

struct InputFlags {
  std::string features;
  std::string tfidf;
  std::string labels;
  std::string mode;  // project the feature block to this mode when set
};

void add_input_flags(CLI::App* app, InputFlags& f) {
  app->add_option("--features", f.features, "Feature CSV from 'featurize'");
  app->add_option("--tfidf", f.tfidf, "TF-IDF CSV from 'vectorize', concatenated after features");
  app->add_option("--labels", f.labels, "CSV with comment_id,label (overrides label columns)");
  app->add_option("--mode", f.mode, "Project the feature block to this mode")
      ->check(CLI::IsMember({"full", "deploy"}));
}

ModelInput load_model_input(Run& run, const InputFlags& f) {
  if (f.features.empty() && f.tfidf.empty()) {
    throw UsageError("need --features, --tfidf, or both");
  }
  ModelInput input;
  std::vector<std::string> file_labels;
  if (!f.features.empty()) {
    run.input(f.features);
    MatrixFile file = read_matrix_csv(fs::path(f.features));
    input.feature_mode = file.meta.count("mode") ? file.meta["mode"] : "";
    if (!f.mode.empty()) {
      file.matrix = align_columns(file.matrix, feature_names(parse_feature_mode(f.mode)));
      input.feature_mode = f.mode;
    }
    input.matrix = std::move(file.matrix);
    file_labels = std::move(file.labels);
  }
  if (!f.tfidf.empty()) {
    run.input(f.tfidf);
    MatrixFile file = read_matrix_csv(fs::path(f.tfidf));
    if (f.features.empty()) {
      input.matrix = std::move(file.matrix);
      file_labels = std::move(file.labels);
    } else {
      // Rows are matched by comment id, in the feature file's order.
      std::map<long long, std::size_t> row_of;
      for (std::size_t i = 0; i < file.matrix.ids.size(); ++i) row_of[file.matrix.ids[i]] = i;
      std::vector<std::size_t> order;
      for (long long id : input.matrix.ids) {
        auto it = row_of.find(id);
        if (it == row_of.end()) {
          throw ValidationError("comment " + std::to_string(id) + " is in " + f.features +
                                " but not in " + f.tfidf);
        }
        order.push_back(it->second);
      }
      input.matrix.values = hconcat(input.matrix.values, file.matrix.values.select_rows(order));
      input.matrix.columns.insert(input.matrix.columns.end(), file.matrix.columns.begin(),
                                  file.matrix.columns.end());
      if (file_labels.empty() && !file.labels.empty()) {
        for (std::size_t i : order) file_labels.push_back(file.labels[i]);
      }
    }
  }
  if (!f.labels.empty()) {
    run.input(f.labels);
    const auto by_id = read_labels_file(f.labels);
    std::vector<std::string> missing;
    for (long long id : input.matrix.ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        missing.push_back(std::to_string(id));
      } else {
        input.labels.push_back(it->second);
      }
    }
    if (!missing.empty()) {
      std::string list;
      for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
      throw ValidationError(f.labels + ": no label for " + std::to_string(missing.size()) +
                            " comment(s): " + list + (missing.size() > 10 ? ", ..." : ""));
    }
  } else {
    input.labels = std::move(file_labels);
  }
  return input;
}

void record_input_flags(Run& run, const InputFlags& f) {
  run.config("features", f.features);
  run.config("tfidf", f.tfidf);
  run.config("labels", f.labels);
  run.config("mode", f.mode);
}

// ---- subcommands ----

struct IngestFlags {
  std::string dump, posts, comments, users, history, tag = "java", cutoff = "2017-01-01", out;
};

int cmd_ingest(const IngestFlags& f) {
  Run run("ingest");
  DumpFiles files;
  const fs::path dir(f.dump);
  files.posts = f.posts.empty() ? dir / "Posts.xml" : fs::path(f.posts);
  files.comments = f.comments.empty() ? dir / "Comments.xml" : fs::path(f.comments);
  files.users = f.users.empty() ? dir / "Users.xml" : fs::path(f.users);
  files.history = f.history.empty() ? dir / "PostHistory.xml" : fs::path(f.history);
  for (const fs::path& p : {files.posts, files.comments, files.users, files.history}) {
    run.input(p.string());
  }
  run.config("tag", f.tag);
  run.config("cutoff", f.cutoff);
  const Timestamp cutoff = parse_timestamp(f.cutoff);
  const RawCorpus corpus = parse_dump(files);
  const auto threads = select_answers(corpus, f.tag, cutoff);
  std::ostringstream out;
  write_threads(out, threads);
  run.output(f.out, out.str());
  run.commit();

  std::size_t comments = 0;
  for (const auto& t : threads) comments += t.comments.size();
  const ParseSummary& s = corpus.summary;
  json summary{{"questions", s.questions},
               {"answers", s.answers},
               {"comments", s.comments},
               {"users", s.users},
               {"edit_events", s.edit_events},
               {"skipped_post_types", s.skipped_post_types},
               {"ignored_history_rows", s.ignored_history_rows},
               {"selected_answers", threads.size()},
               {"selected_comments", comments}};
  std::cout << summary.dump(2) << '\n';
  return 0;
}

struct SampleFlags {
  std::string corpus, out;
  std::size_t n = 384;
  std::uint64_t seed = 0;
};

int cmd_sample(const SampleFlags& f) {
  Run run("sample");
  const auto threads = read_corpus(run, f.corpus);
  run.config("n", f.n);
  run.seed("seed", f.seed);
  const std::uint64_t stream = Rng(f.seed).split("sample").next();
  const auto sample = sample_answers(threads, f.n, stream);
  std::ostringstream out;
  write_threads(out, sample);
  run.output(f.out, out.str());
  run.commit();
  std::size_t comments = 0;
  for (const auto& t : sample) comments += t.comments.size();
  std::cout << json{{"answers", sample.size()}, {"comments", comments}}.dump(2) << '\n';
  return 0;
}

struct FeaturizeFlags {
  std::string corpus, embeddings, annotations, labels_out, out, mode = "full";
  int classes = 2;
  unsigned jobs = 1;
};

int cmd_featurize(const FeaturizeFlags& f) {
  Run run("featurize");
  const auto threads = read_corpus(run, f.corpus);
  std::optional<EmbeddingStore> embeddings;
  if (!f.embeddings.empty()) {
    run.input(f.embeddings);
    embeddings = EmbeddingStore::load(fs::path(f.embeddings));
  }
  std::vector<AnnotatedComment> annotated;
  if (!f.annotations.empty()) annotated = read_annotations(run, f.annotations, threads);
  run.config("mode", f.mode);
  run.config("classes", f.classes);

  const FeatureMode mode = parse_feature_mode(f.mode);
  FeatureMatrix fm = featurize_threads(threads, mode, embeddings ? &*embeddings : nullptr, f.jobs);

  MatrixFile file;
  file.meta = {{"kind", "features"},
               {"mode", std::string(to_string(mode))},
               {"embeddings", fm.embeddings_present ? "present" : "absent"}};
  if (annotated.empty()) {
    file.matrix = fm.to_labeled();
  } else {
    // Only annotated comments are kept, in corpus order.
    const auto names = class_names(scheme_from(f.classes));
    std::map<Id, std::string> label_of;
    for (const auto& a : annotated) {
      label_of[a.comment_id] = names[static_cast<std::size_t>(class_index(a, scheme_from(f.classes)))];
    }
    std::vector<FeatureRow> kept;
    for (FeatureRow& r : fm.rows) {
      auto it = label_of.find(r.comment_id);
      if (it == label_of.end()) continue;
      file.labels.push_back(it->second);
      kept.push_back(std::move(r));
    }
    fm.rows = std::move(kept);
    file.matrix = fm.to_labeled();
  }
  std::ostringstream out;
  write_matrix_csv(out, file);
  run.output(f.out, out.str());
  if (!f.labels_out.empty()) {
    if (file.labels.empty()) throw UsageError("--labels-out needs --annotations");
    run.output(f.labels_out, labels_csv(file.matrix.ids, file.labels));
  }
  run.commit();
  std::cout << json{{"rows", file.matrix.ids.size()},
                    {"columns", file.matrix.columns.size()},
                    {"mode", to_string(mode)},
                    {"embeddings_present", fm.embeddings_present},
                    {"missing_embeddings", fm.missing_embeddings}}
                   .dump(2)
            << '\n';
  return 0;
}

struct VectorizeFlags {
  std::string corpus, annotations, vocabulary, vocabulary_out, stopwords, out;
  std::size_t min_count = 3;
  int classes = 2;
};

int cmd_vectorize(const VectorizeFlags& f) {
  Run run("vectorize");
  const auto threads = read_corpus(run, f.corpus);
  std::vector<AnnotatedComment> annotated;
  if (!f.annotations.empty()) annotated = read_annotations(run, f.annotations, threads);
  run.config("classes", f.classes);

  std::map<Id, std::string> label_of;
  const auto names = class_names(scheme_from(f.classes));
  for (const auto& a : annotated) {
    label_of[a.comment_id] = names[static_cast<std::size_t>(class_index(a, scheme_from(f.classes)))];
  }
  std::vector<long long> ids;
  std::vector<std::string> texts, labels;
  for (const auto& t : threads) {
    for (const auto& c : t.comments) {
      if (!annotated.empty()) {
        auto it = label_of.find(c.comment_id);
        if (it == label_of.end()) continue;
        labels.push_back(it->second);
      }
      ids.push_back(c.comment_id);
      texts.push_back(c.text);
    }
  }

  Vocabulary vocabulary;
  if (!f.vocabulary.empty()) {
    run.input(f.vocabulary);
    vocabulary = load_vocabulary(fs::path(f.vocabulary));
  } else {
    std::set<std::string> stopwords;
    if (!f.stopwords.empty()) {
      run.input(f.stopwords);
      stopwords = load_stopwords(fs::path(f.stopwords));
    } else {
      stopwords = default_stopwords();
    }
    std::string joined;
    for (const auto& w : stopwords) joined += w + "\n";
    run.config("stopwords_sha256", sha256_hex(joined));
    run.config("min_count", f.min_count);
    vocabulary = fit_vocabulary(texts, stopwords, f.min_count);
  }

  MatrixFile file;
  file.meta = {{"kind", "tfidf"}, {"vocabulary_size", std::to_string(vocabulary.size())}};
  file.matrix.ids = ids;
  file.matrix.columns = tfidf_column_names(vocabulary);
  file.matrix.values = transform(texts, vocabulary);
  file.labels = labels;
  std::ostringstream out;
  write_matrix_csv(out, file);
  run.output(f.out, out.str());
  if (!f.vocabulary_out.empty()) run.output(f.vocabulary_out, vocabulary_to_json(vocabulary));
  run.commit();
  std::cout << json{{"rows", ids.size()},
                    {"vocabulary_size", vocabulary.size()},
                    {"n_documents", vocabulary.n_documents}}
                   .dump(2)
            << '\n';
  return 0;
}

struct TrainFlags {
  InputFlags input;
  std::string model = "rf", out, format = "json";
  int classes = 2;
  int k = 101;
  int cv = 0;
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;
  int trees = 100;
  double lambda = 1.0;
  int max_iter = 1000;
  double tol = 1e-6;
  double var_smoothing = 1e-9;
  unsigned jobs = 1;
};

TrainFn make_trainer(const TrainFlags& f) {
  switch (parse_model_kind(f.model)) {
    case ModelKind::kLogReg: {
      const LogRegConfig config{f.lambda, f.max_iter, f.tol};
      return [config](const Dataset& d, std::uint64_t) { return train_logreg(d, config); };
    }
    case ModelKind::kGnb: {
      const GnbConfig config{f.var_smoothing};
      return [config](const Dataset& d, std::uint64_t) { return train_gnb(d, config); };
    }
    case ModelKind::kRandomForest: {
      const ForestConfig config{f.trees, f.jobs};
      return [config](const Dataset& d, std::uint64_t seed) {
        return train_rforest(d, config, seed);
      };
    }
  }
  throw ArgumentError("unknown model kind");
}

int cmd_train(const TrainFlags& f) {
  Run run("train");
  ModelInput input = load_model_input(run, f.input);
  if (input.labels.empty()) {
    throw ValidationError("no labels: pass --labels or use a labeled feature file");
  }
  record_input_flags(run, f.input);
  const ModelKind kind = parse_model_kind(f.model);
  run.config("model", to_string(kind));
  run.config("classes", f.classes);
  switch (kind) {
    case ModelKind::kLogReg:
      run.config("lambda", f.lambda);
      run.config("max_iter", f.max_iter);
      run.config("tol", f.tol);
      break;
    case ModelKind::kGnb:
      run.config("var_smoothing", f.var_smoothing);
      break;
    case ModelKind::kRandomForest:
      run.config("trees", f.trees);
      break;
  }
  const Dataset data =
      make_dataset(input.matrix, input.labels, class_names(scheme_from(f.classes)));
  const TrainFn trainer = make_trainer(f);
  run.seed("seed", f.seed);

  if (f.cv > 0) {
    run.config("cv", f.cv);
    const CvResult cv = cross_validate(data, trainer, f.cv, f.seed);
    emit(run, f.out, cv_to_json(cv));
    run.commit();
    return 0;
  }
  if (f.out.empty()) throw UsageError("train needs --out for the model file");

  run.config("k", f.k);
  run.config("validation_fraction", f.validation_fraction);
  const std::uint64_t split_seed = Rng(f.seed).split("validation").next();
  run.seed("validation_split", split_seed);
  const auto [train_rows, validation_rows] =
      stratified_split(data.y, f.validation_fraction, split_seed);
  const Dataset train_data = data.subset(train_rows);
  const Dataset validation = data.subset(validation_rows);
  const ProtocolResult result = median_protocol(trainer, train_data, validation, f.k, f.seed);

  const Matrix proba = predict_proba(result.model, validation.x);
  std::vector<int> predicted(validation.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) predicted[i] = argmax(proba.row(i));
  const EvalReport report = classification_report(validation.y, predicted, data.classes, &proba);

  run.output(f.out, model_to_json(result.model));
  run.commit();
  if (f.format == "text") {
    std::cout << report_to_text(report, "validation") << "selected seed " << result.seed
              << ", median accuracy " << result.accuracy << " over k=" << f.k << '\n';
  } else {
    json summary{{"model", f.out},
                 {"kind", to_string(kind)},
                 {"classes", data.classes},
                 {"n_train", train_data.size()},
                 {"n_validation", validation.size()},
                 {"k", f.k},
                 {"selected_seed", result.seed},
                 {"validation_accuracy", result.accuracy},
                 {"accuracies", result.accuracies},
                 {"validation_report", json::parse(report_to_json(report))}};
    std::cout << summary.dump(2) << '\n';
  }
  return 0;
}

struct EvalFlags {
  InputFlags input;
  std::string model, out, format = "json", title;
};

int cmd_eval(const EvalFlags& f) {
  Run run("eval");
  run.input(f.model);
  const TrainedModel model = load_model(fs::path(f.model));
  ModelInput input = load_model_input(run, f.input);
  if (input.labels.empty()) {
    throw ValidationError("no labels: pass --labels or use a labeled feature file");
  }
  record_input_flags(run, f.input);
  run.config("format", f.format);
  const Dataset truth = make_dataset(input.matrix, input.labels, model.classes);
  const auto predictions = predict(model, input.matrix);
  Matrix proba(0, model.classes.size());
  std::vector<int> predicted;
  for (const Prediction& p : predictions) {
    proba.append_row(p.class_probabilities);
    predicted.push_back(p.predicted_class);
  }
  const EvalReport report = classification_report(truth.y, predicted, model.classes, &proba);
  emit(run, f.out, f.format == "text" ? report_to_text(report, f.title) : report_to_json(report));
  run.commit();
  return 0;
}

struct PredictFlags {
  InputFlags input;
  std::string model, out;
};

int cmd_predict(const PredictFlags& f) {
  Run run("predict");
  run.input(f.model);
  const TrainedModel model = load_model(fs::path(f.model));
  const ModelInput input = load_model_input(run, f.input);
  record_input_flags(run, f.input);
  std::string lines;
  for (const Prediction& p : predict(model, input.matrix)) {
    json probs = json::object();
    for (std::size_t k = 0; k < model.classes.size(); ++k) {
      probs[model.classes[k]] = p.class_probabilities[k];
    }
    lines += json{{"comment_id", p.comment_id},
                  {"predicted_class", model.classes[static_cast<std::size_t>(p.predicted_class)]},
                  {"class_probabilities", probs}}
                 .dump() +
             "\n";
  }
  if (f.out.empty()) {
    std::cout << lines;
  } else {
    run.output(f.out, lines);
  }
  run.commit();
  return 0;
}

struct StatsFlags {
  std::string annotations, corpus, out, format = "json";
};

int cmd_stats(const StatsFlags& f) {
  Run run("stats");
  const auto threads = read_corpus(run, f.corpus);
  const auto annotated = read_annotations(run, f.annotations, threads);
  run.config("format", f.format);
  const EmpiricsReport report = compute_empirics(annotated, threads);
  if (report.latency.missing_post_edit > 0) {
    std::cerr << "warning: " << report.latency.missing_post_edit
              << " URC(s) addressed in the post have no later edit; excluded from latency\n";
  }
  emit(run, f.out, f.format == "text" ? empirics_to_text(report) : empirics_to_json(report));
  run.commit();
  return 0;
}

int cmd_verify(const std::vector<std::string>& paths) {
  bool all_ok = true;
  json results = json::array();
  for (const std::string& p : paths) {
    const bool is_manifest = p.size() > 14 && p.ends_with(".manifest.json");
    const fs::path manifest_path = is_manifest ? fs::path(p) : manifest_path_for(p);
    std::ifstream in(manifest_path);
    if (!in) throw Error("cannot open " + manifest_path.string());
    std::stringstream text;
    text << in.rdbuf();
    const Manifest manifest = Manifest::from_json(text.str());
    const VerifyResult v = verify_manifest(manifest);
    all_ok = all_ok && v.ok;
    results.push_back({{"manifest", manifest_path.string()},
                       {"ok", v.ok},
                       {"mismatches", v.mismatches}});
    for (const auto& m : v.mismatches) std::cerr << "mismatch: " << m << '\n';
  }
  std::cout << json{{"ok", all_ok}, {"manifests", results}}.dump(2) << '\n';
  return all_ok ? 0 : 1;
}

int run(int argc, char** argv) {
  CLI::App app{"Detect and analyse update-request comments on Stack Overflow answers"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  IngestFlags ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse a dump and select answer threads");
  c_ingest->add_option("--dump", ingest.dump, "Directory with Posts/Comments/Users/PostHistory.xml");
  c_ingest->add_option("--posts", ingest.posts);
  c_ingest->add_option("--comments", ingest.comments);
  c_ingest->add_option("--users", ingest.users);
  c_ingest->add_option("--history", ingest.history);
  c_ingest->add_option("--tag", ingest.tag, "Question tag")->capture_default_str();
  c_ingest->add_option("--cutoff", ingest.cutoff, "Minimum last activity date")->capture_default_str();
  c_ingest->add_option("--out", ingest.out, "Thread JSON-lines output")->required();

  SampleFlags sample;
  auto* c_sample = app.add_subcommand("sample", "Draw a uniform sample of answer threads");
  c_sample->add_option("--corpus", sample.corpus, "Thread JSON-lines input")->required();
  c_sample->add_option("--n", sample.n, "Sample size")->capture_default_str();
  c_sample->add_option("--seed", sample.seed)->capture_default_str();
  c_sample->add_option("--out", sample.out)->required();

  FeaturizeFlags featurize;
  auto* c_feat = app.add_subcommand("featurize", "Compute per-comment features");
  c_feat->add_option("--corpus", featurize.corpus)->required();
  c_feat->add_option("--mode", featurize.mode)
      ->check(CLI::IsMember({"full", "deploy"}))
      ->capture_default_str();
  c_feat->add_option("--embeddings", featurize.embeddings, "Sentence-embedding JSON-lines sidecar");
  c_feat->add_option("--annotations", featurize.annotations, "Keep annotated comments and label them");
  c_feat->add_option("--classes", featurize.classes)->check(CLI::IsMember({2, 3}))->capture_default_str();
  c_feat->add_option("--labels-out", featurize.labels_out, "Also write comment_id,label CSV");
  c_feat->add_option("--jobs", featurize.jobs)->check(CLI::PositiveNumber);
  c_feat->add_option("--out", featurize.out)->required();

  VectorizeFlags vectorize;
  auto* c_vec = app.add_subcommand("vectorize", "Compute TF-IDF vectors of comment texts");
  c_vec->add_option("--corpus", vectorize.corpus)->required();
  c_vec->add_option("--annotations", vectorize.annotations);
  c_vec->add_option("--classes", vectorize.classes)->check(CLI::IsMember({2, 3}))->capture_default_str();
  c_vec->add_option("--vocabulary", vectorize.vocabulary, "Reuse a fitted vocabulary");
  c_vec->add_option("--vocabulary-out", vectorize.vocabulary_out, "Write the fitted vocabulary");
  c_vec->add_option("--stopwords", vectorize.stopwords, "Stop-word file (default: bundled list)");
  c_vec->add_option("--min-count", vectorize.min_count)->capture_default_str();
  c_vec->add_option("--out", vectorize.out)->required();

  TrainFlags train;
  auto* c_train = app.add_subcommand("train", "Train a classifier with the median-of-k protocol");
  add_input_flags(c_train, train.input);
  c_train->add_option("--model", train.model)
      ->check(CLI::IsMember({"rf", "rforest", "lr", "logreg", "nb", "gnb"}))
      ->capture_default_str();
  c_train->add_option("--classes", train.classes)->check(CLI::IsMember({2, 3}))->capture_default_str();
  c_train->add_option("--k", train.k, "Runs in the median protocol")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_train->add_option("--seed", train.seed)->capture_default_str();
  c_train->add_option("--validation-fraction", train.validation_fraction)->capture_default_str();
  c_train->add_option("--cv", train.cv, "Report k-fold cross-validation instead of training")
      ->check(CLI::Range(2, 1000));
  c_train->add_option("--trees", train.trees)->check(CLI::PositiveNumber)->capture_default_str();
  c_train->add_option("--lambda", train.lambda)->capture_default_str();
  c_train->add_option("--max-iter", train.max_iter)->capture_default_str();
  c_train->add_option("--tol", train.tol)->capture_default_str();
  c_train->add_option("--var-smoothing", train.var_smoothing)->capture_default_str();
  c_train->add_option("--jobs", train.jobs)->check(CLI::PositiveNumber);
  c_train->add_option("--format", train.format)->check(CLI::IsMember({"json", "text"}));
  c_train->add_option("--out", train.out, "Model JSON (CV report with --cv)");

  EvalFlags eval;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a model on labeled data");
  c_eval->add_option("--model", eval.model)->required();
  add_input_flags(c_eval, eval.input);
  c_eval->add_option("--format", eval.format)->check(CLI::IsMember({"json", "text"}));
  c_eval->add_option("--title", eval.title);
  c_eval->add_option("--out", eval.out);

  PredictFlags predict_flags;
  auto* c_pred = app.add_subcommand("predict", "Predict classes as JSON lines");
  c_pred->add_option("--model", predict_flags.model)->required();
  add_input_flags(c_pred, predict_flags.input);
  c_pred->add_option("--out", predict_flags.out);

  StatsFlags stats;
  auto* c_stats = app.add_subcommand("stats", "Prevalence, latency, role and score statistics");
  c_stats->add_option("--annotations", stats.annotations)->required();
  c_stats->add_option("--corpus", stats.corpus)->required();
  c_stats->add_option("--format", stats.format)->check(CLI::IsMember({"json", "text"}));
  c_stats->add_option("--out", stats.out);

  std::vector<std::string> verify_paths;
  auto* c_verify = app.add_subcommand("verify", "Recompute digests recorded in manifests");
  c_verify->add_option("paths", verify_paths, "Outputs or their .manifest.json files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*c_ingest) {
      if (ingest.dump.empty() && (ingest.posts.empty() || ingest.comments.empty() ||
                                  ingest.users.empty() || ingest.history.empty())) {
        std::cerr << "ingest: pass --dump or all of --posts --comments --users --history\n";
        return 2;
      }
      return cmd_ingest(ingest);
    }
    if (*c_sample) return cmd_sample(sample);
    if (*c_feat) return cmd_featurize(featurize);
    if (*c_vec) return cmd_vectorize(vectorize);
    if (*c_train) return cmd_train(train);
    if (*c_eval) return cmd_eval(eval);
    if (*c_pred) return cmd_predict(predict_flags);
    if (*c_stats) return cmd_stats(stats);
    if (*c_verify) return cmd_verify(verify_paths);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
