#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urcminer/corpus.hpp"
#include "urcminer/matrix.hpp"

namespace urcminer {

enum class FeatureMode { kFull, kDeploy };

std::string_view to_string(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view text);

struct RoleFlags {
  bool by_asker = false;
  bool by_answerer = false;
  bool by_not_seen_commenter = false;
  bool by_seen_commenter = false;
};

struct RoleInfo {
  RoleFlags flags;
  std::int64_t user_reputation = 1;
};

// Role of the author of `thread.comments[index]`. Comments without an owner
// (deleted accounts) are treated as distinct anonymous third parties with
// reputation 1.
RoleInfo resolve_role(const AnswerThread& thread, std::size_t index);

// Gap used when the previous or next event does not exist: ten years.
inline constexpr double kMissingGapMinutes = 5'256'000.0;

// ln(1 + max(0, minutes)).
double log_minutes(double minutes);

struct TimeFeatures {
  double prev_post_edit_time = 0.0;
  double next_post_edit_time = 0.0;
  double prev_comment_time = 0.0;
  double next_comment_time = 0.0;
};

// Post edits at the comment's own timestamp count as previous. The creation
// event is an edit, so prev_post_edit_time is always finite for comments
// posted after the answer.
TimeFeatures time_features(const AnswerThread& thread, std::size_t index);

// Jaccard between the comment and the tokens added or removed by the first
// post edit after it; 0.0 when the post was never edited afterwards.
double post_change_similarity(const AnswerThread& thread, std::size_t index);

enum class TalksTo { kNobody = 0, kAsker = 1, kAnswerer = 2, kCommenter = 3 };

struct SurfaceFeatures {
  std::int64_t text_len = 0;
  bool starts_with_at = false;
  bool contains_question_mark = false;
  bool contains_exclamation_mark = false;
  bool contains_but = false;
  bool contains_exception = false;
  bool contains_url = false;
  bool contains_emotions = false;
  TalksTo talks_to_role = TalksTo::kNobody;
};

SurfaceFeatures surface_features(const AnswerThread& thread, std::size_t index);

// Text-only part of surface_features (talks_to_role left at kNobody).
SurfaceFeatures text_surface_features(std::string_view text);

// The first @mention in `text`, lowercased; empty if none. An '@' preceded
// by an alphanumeric character (e-mail addresses) is not a mention.
std::string extract_mention(std::string_view text);

// Sentence-embedding vectors keyed by comment id, read from a JSON-lines
// sidecar of {"comment_id": ..., "vector": [...]}. All vectors share one
// dimension.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  static EmbeddingStore load(std::istream& in);
  static EmbeddingStore load(const std::filesystem::path& path);

  void add(Id comment_id, std::vector<double> vector);
  const std::vector<double>* find(Id comment_id) const;
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }

 private:
  std::map<Id, std::vector<double>> vectors_;
  std::size_t dimension_ = 0;
};

struct FeatureVector {
  std::int64_t comment_score = 0;
  std::int64_t comment_order = 1;
  std::int64_t post_score = 0;
  std::int64_t post_comment_count = 0;
  RoleFlags role;
  std::int64_t user_reputation = 1;
  TimeFeatures time;
  double prev_comment_jaccard_sim = 0.0;
  double next_comment_jaccard_sim = 0.0;
  double prev_comment_embed_sim = 0.0;
  double next_comment_embed_sim = 0.0;
  double comment_post_change_sim = 0.0;
  double polarity = 0.0;
  double subjectivity = 0.0;
  SurfaceFeatures surface;
};

// Column registry. Full mode has 29 columns in this order:
//   comment_score, comment_order, post_score, post_comment_count,
//   by_asker, by_answerer, by_not_seen_commenter, by_seen_commenter,
//   user_reputation, prev_post_edit_time, next_post_edit_time,
//   prev_comment_time, next_comment_time, prev_comment_jaccard_sim,
//   next_comment_jaccard_sim, prev_comment_embed_sim, next_comment_embed_sim,
//   comment_post_change_sim, polarity, subjectivity, text_len,
//   starts_with_at, contains_question_mark, contains_exclamation_mark,
//   contains_but, contains_exception, contains_url, contains_emotions,
//   talks_to_role
// Booleans are 0/1 and talks_to_role is a single 0..3 column. Deploy mode
// keeps the same order minus the six columns only known after the fact
// (see deploy_dropped_columns()), leaving 23.
const std::vector<std::string>& feature_names(FeatureMode mode);
const std::vector<std::string>& deploy_dropped_columns();
std::vector<double> feature_values(const FeatureVector& fv, FeatureMode mode);

struct FeatureRow {
  Id comment_id = 0;
  FeatureVector features;
  std::optional<std::string> label;
};

struct FeatureMatrix {
  std::vector<FeatureRow> rows;
  std::vector<std::string> feature_names;
  FeatureMode mode = FeatureMode::kFull;
  bool embeddings_present = false;
  std::size_t missing_embeddings = 0;  // comments with no vector in the sidecar

  LabeledMatrix to_labeled() const;
};

FeatureVector featurize_comment(const AnswerThread& thread, std::size_t index,
                                const EmbeddingStore* embeddings);

FeatureMatrix featurize_thread(const AnswerThread& thread, FeatureMode mode,
                               const EmbeddingStore* embeddings);

// Threads are processed on up to `jobs` threads; output order follows input.
FeatureMatrix featurize_threads(std::span<const AnswerThread> threads, FeatureMode mode,
                                const EmbeddingStore* embeddings, unsigned jobs = 1);

}  // namespace urcminer
