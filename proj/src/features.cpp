#include "urcminer/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <future>
#include <istream>

#include <json.hpp>

#include "urcminer/sentiment.hpp"
#include "urcminer/text.hpp"

namespace urcminer {
namespace {

constexpr std::array<std::string_view, 10> kEmoticons = {
    ":)", ":(", ";)", ":D", ":P", ":-)", ":-(", ";-)", ":-D", ":/"};

// A mention must name at least this many characters to resolve, matching the
// site's own @-reply rule.
constexpr std::size_t kMinMentionLength = 3;

bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower(c);
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

// Case-insensitive whole-word search for an all-lowercase `word`.
bool contains_word(std::string_view lowered, std::string_view word) {
  std::size_t pos = lowered.find(word);
  while (pos != std::string_view::npos) {
    const bool left_ok = pos == 0 || !is_alnum(lowered[pos - 1]);
    const std::size_t end = pos + word.size();
    const bool right_ok = end == lowered.size() || !is_alnum(lowered[end]);
    if (left_ok && right_ok) return true;
    pos = lowered.find(word, pos + 1);
  }
  return false;
}

bool contains_emoticon(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    std::string_view token = text.substr(i, j - i);
    // Allow trailing sentence punctuation: "thanks :)."
    for (int pass = 0; pass < 2 && !token.empty(); ++pass) {
      if (std::find(kEmoticons.begin(), kEmoticons.end(), token) != kEmoticons.end()) {
        return true;
      }
      while (!token.empty() && (token.back() == '.' || token.back() == ',' ||
                                token.back() == '!' || token.back() == '?')) {
        token.remove_suffix(1);
      }
    }
    i = j;
  }
  return false;
}

std::string normalize_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (!is_space(c)) out += lower(c);
  }
  return out;
}

bool mention_matches(const std::string& mention, std::string_view display_name) {
  if (mention.size() < kMinMentionLength) return false;
  return normalize_name(display_name).starts_with(mention);
}

std::optional<std::string> display_name_of(const AnswerThread& t, std::optional<Id> user) {
  if (const RawUser* u = t.find_user(user)) return u->display_name;
  return std::nullopt;
}

bool same_user(std::optional<Id> a, std::optional<Id> b) { return a && b && *a == *b; }

const std::vector<std::string> kFullNames = {
    "comment_score",          "comment_order",
    "post_score",             "post_comment_count",
    "by_asker",               "by_answerer",
    "by_not_seen_commenter",  "by_seen_commenter",
    "user_reputation",        "prev_post_edit_time",
    "next_post_edit_time",    "prev_comment_time",
    "next_comment_time",      "prev_comment_jaccard_sim",
    "next_comment_jaccard_sim", "prev_comment_embed_sim",
    "next_comment_embed_sim", "comment_post_change_sim",
    "polarity",               "subjectivity",
    "text_len",               "starts_with_at",
    "contains_question_mark", "contains_exclamation_mark",
    "contains_but",           "contains_exception",
    "contains_url",           "contains_emotions",
    "talks_to_role"};

const std::vector<std::string> kDropped = {
    "comment_score",           "next_post_edit_time",    "next_comment_time",
    "next_comment_jaccard_sim", "next_comment_embed_sim", "comment_post_change_sim"};

std::vector<std::string> make_deploy_names() {
  std::vector<std::string> names;
  for (const auto& n : kFullNames) {
    if (std::find(kDropped.begin(), kDropped.end(), n) == kDropped.end()) names.push_back(n);
  }
  return names;
}

double b2d(bool b) { return b ? 1.0 : 0.0; }

}  // namespace

std::string_view to_string(FeatureMode mode) {
  return mode == FeatureMode::kFull ? "full" : "deploy";
}

FeatureMode parse_feature_mode(std::string_view text) {
  if (text == "full") return FeatureMode::kFull;
  if (text == "deploy") return FeatureMode::kDeploy;
  throw ArgumentError("feature mode must be full|deploy, got '" + std::string(text) + "'");
}

RoleInfo resolve_role(const AnswerThread& thread, std::size_t index) {
  const RawComment& c = thread.comments.at(index);
  RoleInfo info;
  info.flags.by_asker = same_user(c.owner_user_id, thread.question.owner_user_id);
  info.flags.by_answerer = same_user(c.owner_user_id, thread.answer.owner_user_id);
  if (!info.flags.by_asker && !info.flags.by_answerer) {
    bool seen = false;
    for (std::size_t j = 0; j < index && !seen; ++j) {
      seen = same_user(thread.comments[j].owner_user_id, c.owner_user_id);
    }
    info.flags.by_seen_commenter = seen;
    info.flags.by_not_seen_commenter = !seen;
  }
  if (const RawUser* u = thread.find_user(c.owner_user_id)) {
    info.user_reputation = u->reputation;
  }
  return info;
}

double log_minutes(double minutes) { return std::log1p(std::max(0.0, minutes)); }

TimeFeatures time_features(const AnswerThread& thread, std::size_t index) {
  const RawComment& c = thread.comments.at(index);
  const double missing = log_minutes(kMissingGapMinutes);
  TimeFeatures tf{missing, missing, missing, missing};
  if (index > 0) {
    tf.prev_comment_time =
        log_minutes(minutes_between(thread.comments[index - 1].creation_ts, c.creation_ts));
  }
  if (index + 1 < thread.comments.size()) {
    tf.next_comment_time =
        log_minutes(minutes_between(c.creation_ts, thread.comments[index + 1].creation_ts));
  }
  // edits are ordered by time: first edit strictly after the comment.
  auto next = std::upper_bound(
      thread.edits.begin(), thread.edits.end(), c.creation_ts,
      [](Timestamp ts, const PostEditEvent& e) { return ts < e.edit_ts; });
  if (next != thread.edits.begin()) {
    tf.prev_post_edit_time = log_minutes(minutes_between(std::prev(next)->edit_ts, c.creation_ts));
  }
  if (next != thread.edits.end()) {
    tf.next_post_edit_time = log_minutes(minutes_between(c.creation_ts, next->edit_ts));
  }
  return tf;
}

double post_change_similarity(const AnswerThread& thread, std::size_t index) {
  const RawComment& c = thread.comments.at(index);
  auto next = std::upper_bound(
      thread.edits.begin(), thread.edits.end(), c.creation_ts,
      [](Timestamp ts, const PostEditEvent& e) { return ts < e.edit_ts; });
  if (next == thread.edits.end()) return 0.0;
  const std::set<std::string> after = token_set(strip_markup(next->body_after));
  const std::set<std::string> before =
      next == thread.edits.begin() ? std::set<std::string>{}
                                   : token_set(strip_markup(std::prev(next)->body_after));
  std::set<std::string> diff;
  std::set_symmetric_difference(before.begin(), before.end(), after.begin(), after.end(),
                                std::inserter(diff, diff.end()));
  return jaccard(token_set(c.text), diff);
}

std::string extract_mention(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '@') continue;
    if (i > 0 && is_alnum(text[i - 1])) continue;
    std::size_t j = i + 1;
    while (j < text.size()) {
      const char c = text[j];
      const bool non_ascii = (static_cast<unsigned char>(c) & 0x80) != 0;
      if (!(is_alnum(c) || c == '_' || c == '-' || c == '.' || c == '\'' || non_ascii)) break;
      ++j;
    }
    std::string_view name = text.substr(i + 1, j - i - 1);
    while (!name.empty() && (name.back() == '.' || name.back() == '-' || name.back() == '\'')) {
      name.remove_suffix(1);
    }
    if (!name.empty()) return lowercase(name);
  }
  return {};
}

SurfaceFeatures text_surface_features(std::string_view text) {
  SurfaceFeatures s;
  s.text_len = static_cast<std::int64_t>(utf8_length(text));
  const auto first = std::find_if_not(text.begin(), text.end(), is_space);
  s.starts_with_at = first != text.end() && *first == '@';
  s.contains_question_mark = text.find('?') != std::string_view::npos;
  s.contains_exclamation_mark = text.find('!') != std::string_view::npos;
  const std::string lowered = lowercase(text);
  s.contains_but = contains_word(lowered, "but");
  s.contains_exception = contains_word(lowered, "exception");
  s.contains_url = lowered.find("http://") != std::string::npos ||
                   lowered.find("https://") != std::string::npos ||
                   lowered.find("www.") != std::string::npos;
  s.contains_emotions = contains_emoticon(text);
  return s;
}

SurfaceFeatures surface_features(const AnswerThread& thread, std::size_t index) {
  const RawComment& c = thread.comments.at(index);
  SurfaceFeatures s = text_surface_features(c.text);
  const std::string mention = extract_mention(c.text);
  if (mention.empty()) return s;
  auto matches = [&](const std::optional<std::string>& name) {
    return name && mention_matches(mention, *name);
  };
  if (matches(display_name_of(thread, thread.question.owner_user_id))) {
    s.talks_to_role = TalksTo::kAsker;
  } else if (matches(display_name_of(thread, thread.answer.owner_user_id))) {
    s.talks_to_role = TalksTo::kAnswerer;
  } else {
    for (std::size_t j = 0; j < index; ++j) {
      const RawComment& earlier = thread.comments[j];
      std::optional<std::string> name = display_name_of(thread, earlier.owner_user_id);
      if (!name) name = earlier.user_display_name;
      if (matches(name)) {
        s.talks_to_role = TalksTo::kCommenter;
        break;
      }
    }
  }
  return s;
}

// ---- embeddings ----

void EmbeddingStore::add(Id comment_id, std::vector<double> vector) {
  if (vectors_.empty()) {
    dimension_ = vector.size();
  } else if (vector.size() != dimension_) {
    throw ArgumentError("embedding for comment " + std::to_string(comment_id) + " has dimension " +
                        std::to_string(vector.size()) + ", expected " +
                        std::to_string(dimension_));
  }
  vectors_[comment_id] = std::move(vector);
}

const std::vector<double>* EmbeddingStore::find(Id comment_id) const {
  auto it = vectors_.find(comment_id);
  return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingStore EmbeddingStore::load(std::istream& in) {
  EmbeddingStore store;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      store.add(j.at("comment_id").get<Id>(), j.at("vector").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("embedding line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ArgumentError& e) {
      throw ValidationError("embedding line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return store;
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return load(in);
}

// ---- registry ----

const std::vector<std::string>& feature_names(FeatureMode mode) {
  static const std::vector<std::string> deploy = make_deploy_names();
  return mode == FeatureMode::kFull ? kFullNames : deploy;
}

const std::vector<std::string>& deploy_dropped_columns() { return kDropped; }

std::vector<double> feature_values(const FeatureVector& fv, FeatureMode mode) {
  const auto d = [](std::int64_t v) { return static_cast<double>(v); };
  std::vector<double> all = {
      d(fv.comment_score),
      d(fv.comment_order),
      d(fv.post_score),
      d(fv.post_comment_count),
      b2d(fv.role.by_asker),
      b2d(fv.role.by_answerer),
      b2d(fv.role.by_not_seen_commenter),
      b2d(fv.role.by_seen_commenter),
      d(fv.user_reputation),
      fv.time.prev_post_edit_time,
      fv.time.next_post_edit_time,
      fv.time.prev_comment_time,
      fv.time.next_comment_time,
      fv.prev_comment_jaccard_sim,
      fv.next_comment_jaccard_sim,
      fv.prev_comment_embed_sim,
      fv.next_comment_embed_sim,
      fv.comment_post_change_sim,
      fv.polarity,
      fv.subjectivity,
      d(fv.surface.text_len),
      b2d(fv.surface.starts_with_at),
      b2d(fv.surface.contains_question_mark),
      b2d(fv.surface.contains_exclamation_mark),
      b2d(fv.surface.contains_but),
      b2d(fv.surface.contains_exception),
      b2d(fv.surface.contains_url),
      b2d(fv.surface.contains_emotions),
      static_cast<double>(static_cast<int>(fv.surface.talks_to_role)),
  };
  if (mode == FeatureMode::kFull) return all;
  std::vector<double> kept;
  kept.reserve(all.size() - kDropped.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (std::find(kDropped.begin(), kDropped.end(), kFullNames[i]) == kDropped.end()) {
      kept.push_back(all[i]);
    }
  }
  return kept;
}

LabeledMatrix FeatureMatrix::to_labeled() const {
  LabeledMatrix m;
  m.columns = feature_names;
  m.values = Matrix(0, feature_names.size());
  for (const FeatureRow& r : rows) {
    m.ids.push_back(r.comment_id);
    m.values.append_row(feature_values(r.features, mode));
  }
  return m;
}

// ---- extraction ----

FeatureVector featurize_comment(const AnswerThread& thread, std::size_t index,
                                const EmbeddingStore* embeddings) {
  const RawComment& c = thread.comments.at(index);
  FeatureVector fv;
  fv.comment_score = c.score;
  fv.comment_order = static_cast<std::int64_t>(index) + 1;
  fv.post_score = thread.answer.score;
  fv.post_comment_count = static_cast<std::int64_t>(thread.comments.size());
  const RoleInfo role = resolve_role(thread, index);
  fv.role = role.flags;
  fv.user_reputation = role.user_reputation;
  fv.time = time_features(thread, index);

  const auto own_tokens = token_set(c.text);
  const bool has_prev = index > 0;
  const bool has_next = index + 1 < thread.comments.size();
  if (has_prev) {
    fv.prev_comment_jaccard_sim = jaccard(own_tokens, token_set(thread.comments[index - 1].text));
  }
  if (has_next) {
    fv.next_comment_jaccard_sim = jaccard(own_tokens, token_set(thread.comments[index + 1].text));
  }
  if (embeddings != nullptr) {
    const auto* own = embeddings->find(c.comment_id);
    auto sim = [&](std::size_t other) {
      const auto* v = embeddings->find(thread.comments[other].comment_id);
      return (own != nullptr && v != nullptr) ? cosine(*own, *v) : 0.0;
    };
    if (has_prev) fv.prev_comment_embed_sim = sim(index - 1);
    if (has_next) fv.next_comment_embed_sim = sim(index + 1);
  }
  fv.comment_post_change_sim = post_change_similarity(thread, index);
  const SentimentScore s = sentiment(c.text);
  fv.polarity = s.polarity;
  fv.subjectivity = s.subjectivity;
  fv.surface = surface_features(thread, index);
  return fv;
}

FeatureMatrix featurize_thread(const AnswerThread& thread, FeatureMode mode,
                               const EmbeddingStore* embeddings) {
  return featurize_threads(std::span<const AnswerThread>(&thread, 1), mode, embeddings, 1);
}

FeatureMatrix featurize_threads(std::span<const AnswerThread> threads, FeatureMode mode,
                                const EmbeddingStore* embeddings, unsigned jobs) {
  FeatureMatrix m;
  m.mode = mode;
  m.feature_names = feature_names(mode);
  m.embeddings_present = embeddings != nullptr;

  std::vector<std::vector<FeatureRow>> per_thread(threads.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const AnswerThread& thread = threads[t];
      for (std::size_t i = 0; i < thread.comments.size(); ++i) {
        per_thread[t].push_back(FeatureRow{thread.comments[i].comment_id,
                                           featurize_comment(thread, i, embeddings),
                                           std::nullopt});
      }
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1 || threads.size() < 2) {
    work(0, threads.size());
  } else {
    std::vector<std::future<void>> tasks;
    const std::size_t chunk = (threads.size() + jobs - 1) / jobs;
    for (std::size_t b = 0; b < threads.size(); b += chunk) {
      tasks.push_back(std::async(std::launch::async, work, b, std::min(threads.size(), b + chunk)));
    }
    for (auto& t : tasks) t.get();
  }
  for (std::size_t t = 0; t < threads.size(); ++t) {
    for (FeatureRow& r : per_thread[t]) {
      if (embeddings != nullptr && embeddings->find(r.comment_id) == nullptr) {
        ++m.missing_embeddings;
      }
      m.rows.push_back(std::move(r));
    }
  }
  return m;
}

}  // namespace urcminer
