#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urcminer/common.hpp"

namespace urcminer {

enum class PostType { kQuestion, kAnswer };

struct RawPost {
  Id post_id = 0;
  PostType post_type = PostType::kQuestion;
  std::optional<Id> parent_id;           // answers only
  std::optional<Id> accepted_answer_id;  // questions only
  std::optional<Id> owner_user_id;
  std::int64_t score = 0;
  Timestamp creation_ts{};
  Timestamp last_activity_ts{};
  std::vector<std::string> tags;  // lowercase, questions only
  std::string body;

  bool operator==(const RawPost&) const = default;
};

struct RawComment {
  Id comment_id = 0;
  Id post_id = 0;
  std::optional<Id> owner_user_id;
  std::int64_t score = 0;
  Timestamp creation_ts{};
  std::string text;
  // Dumps carry UserDisplayName for comments of deleted accounts.
  std::optional<std::string> user_display_name;

  bool operator==(const RawComment&) const = default;
};

struct RawUser {
  Id user_id = 0;
  std::int64_t reputation = 1;
  std::string display_name;

  bool operator==(const RawUser&) const = default;
};

struct PostEditEvent {
  Id post_id = 0;
  std::optional<Id> editor_user_id;
  Timestamp edit_ts{};
  std::string body_after;

  bool operator==(const PostEditEvent&) const = default;
};

struct ParseSummary {
  std::size_t questions = 0;
  std::size_t answers = 0;
  std::size_t comments = 0;
  std::size_t users = 0;
  std::size_t edit_events = 0;
  std::size_t skipped_post_types = 0;     // PostTypeId other than 1 or 2
  std::size_t ignored_history_rows = 0;   // title, tag and other non-body edits
};

struct RawCorpus {
  std::vector<RawPost> posts;        // ordered by post_id
  std::vector<RawComment> comments;  // ordered by (post_id, creation_ts, comment_id)
  std::map<Id, RawUser> users;
  std::map<Id, std::vector<PostEditEvent>> edits;  // per post, ordered by edit_ts
  ParseSummary summary;
};

struct AnswerThread {
  RawPost question;
  RawPost answer;
  std::vector<RawComment> comments;  // ordered by (creation_ts, comment_id)
  std::vector<PostEditEvent> edits;  // edits[0] is the creation event
  std::map<Id, RawUser> users;

  // max(creation, last body edit).
  Timestamp last_activity() const;
  const RawUser* find_user(std::optional<Id> id) const;

  bool operator==(const AnswerThread&) const = default;
};

struct DumpFiles {
  std::filesystem::path posts;
  std::filesystem::path comments;
  std::filesystem::path users;
  std::filesystem::path history;
};

// Stream variants; the path overload opens the four files and parses them
// concurrently.
RawCorpus parse_dump(std::istream& posts, std::istream& comments,
                     std::istream& users, std::istream& history);
RawCorpus parse_dump(const DumpFiles& files);

// Answers that pass the acquisition filter, ordered by answer id. A question
// contributes its accepted answer and its top-scored answer (ties: accepted
// first, then lowest answer id).
std::vector<AnswerThread> select_answers(const RawCorpus& corpus,
                                         std::string_view tag,
                                         Timestamp cutoff);

// Uniform sample without replacement; the result depends only on the set of
// answer ids and the seed, and is ordered by answer id.
std::vector<AnswerThread> sample_answers(std::span<const AnswerThread> threads,
                                         std::size_t n, std::uint64_t seed);

// JSON-lines corpus format: one AnswerThread per line.
std::string thread_to_json_line(const AnswerThread& thread);
AnswerThread thread_from_json_line(std::string_view line);
void write_threads(std::ostream& out, std::span<const AnswerThread> threads);
std::vector<AnswerThread> read_threads(std::istream& in);
std::vector<AnswerThread> read_threads(const std::filesystem::path& path);

}  // namespace urcminer
