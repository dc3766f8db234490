#include "urcminer/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "urcminer/rng.hpp"
#include "urcminer/xml_rows.hpp"

namespace urcminer {
namespace {

using nlohmann::json;

// PostHistoryTypeId values that change the body: initial body, edit body,
// rollback body.
constexpr int kInitialBody = 2;
constexpr int kEditBody = 5;
constexpr int kRollbackBody = 8;

const std::string* find_attr(const XmlRow& row, std::string_view name) {
  auto it = row.find(name);
  return it == row.end() ? nullptr : &it->second;
}

std::int64_t to_int(const std::string& text, std::string_view field,
                    std::size_t line) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("non-integer " + std::string(field) + " '" + text + "'", line);
  }
  return value;
}

std::int64_t require_int(const XmlRow& row, std::string_view field,
                         std::size_t line) {
  const std::string* v = find_attr(row, field);
  if (v == nullptr) {
    throw ParseError("missing attribute " + std::string(field), line);
  }
  return to_int(*v, field, line);
}

std::optional<std::int64_t> optional_int(const XmlRow& row,
                                         std::string_view field,
                                         std::size_t line) {
  const std::string* v = find_attr(row, field);
  if (v == nullptr || v->empty()) return std::nullopt;
  return to_int(*v, field, line);
}

Timestamp require_ts(const XmlRow& row, std::string_view field,
                     std::size_t line) {
  const std::string* v = find_attr(row, field);
  if (v == nullptr) {
    throw ParseError("missing attribute " + std::string(field), line);
  }
  try {
    return parse_timestamp(*v);
  } catch (const ArgumentError& e) {
    throw ParseError(e.what(), line);
  }
}

std::string attr_or_empty(const XmlRow& row, std::string_view field) {
  const std::string* v = find_attr(row, field);
  return v == nullptr ? std::string() : *v;
}

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Handles both "<java><generics>" and "|java|generics|".
std::vector<std::string> split_tags(const std::string& raw) {
  std::vector<std::string> tags;
  std::string current;
  for (char c : raw) {
    if (c == '<' || c == '>' || c == '|') {
      if (!current.empty()) tags.push_back(lowercase(std::move(current)));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) tags.push_back(lowercase(std::move(current)));
  return tags;
}

bool looks_like_guid(const std::string& s) {
  if (s.size() != 36) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool dash = i == 8 || i == 13 || i == 18 || i == 23;
    if (dash ? s[i] != '-' : !std::isxdigit(static_cast<unsigned char>(s[i]))) {
      return false;
    }
  }
  return true;
}

struct PostsPart {
  std::vector<RawPost> posts;
  std::size_t skipped = 0;
};

PostsPart parse_posts(std::istream& in) {
  PostsPart part;
  read_dump_rows(in, [&](const XmlRow& row, std::size_t line) {
    const std::int64_t type = require_int(row, "PostTypeId", line);
    if (type != 1 && type != 2) {
      ++part.skipped;
      return;
    }
    RawPost post;
    post.post_id = require_int(row, "Id", line);
    post.post_type = type == 1 ? PostType::kQuestion : PostType::kAnswer;
    post.owner_user_id = optional_int(row, "OwnerUserId", line);
    post.score = optional_int(row, "Score", line).value_or(0);
    post.creation_ts = require_ts(row, "CreationDate", line);
    post.last_activity_ts = find_attr(row, "LastActivityDate") != nullptr
                                ? require_ts(row, "LastActivityDate", line)
                                : post.creation_ts;
    post.body = attr_or_empty(row, "Body");
    if (post.post_type == PostType::kAnswer) {
      post.parent_id = optional_int(row, "ParentId", line);
      if (!post.parent_id) throw ParseError("answer without ParentId", line);
    } else {
      post.accepted_answer_id = optional_int(row, "AcceptedAnswerId", line);
      post.tags = split_tags(attr_or_empty(row, "Tags"));
    }
    if (post.last_activity_ts < post.creation_ts) {
      post.last_activity_ts = post.creation_ts;
    }
    part.posts.push_back(std::move(post));
  });
  return part;
}

std::vector<RawComment> parse_comments(std::istream& in) {
  std::vector<RawComment> comments;
  read_dump_rows(in, [&](const XmlRow& row, std::size_t line) {
    RawComment c;
    c.comment_id = require_int(row, "Id", line);
    c.post_id = require_int(row, "PostId", line);
    c.owner_user_id = optional_int(row, "UserId", line);
    c.score = optional_int(row, "Score", line).value_or(0);
    if (c.score < 0) throw ParseError("negative comment score", line);
    c.creation_ts = require_ts(row, "CreationDate", line);
    c.text = attr_or_empty(row, "Text");
    if (const std::string* name = find_attr(row, "UserDisplayName")) {
      c.user_display_name = *name;
    }
    comments.push_back(std::move(c));
  });
  return comments;
}

std::map<Id, RawUser> parse_users(std::istream& in) {
  std::map<Id, RawUser> users;
  read_dump_rows(in, [&](const XmlRow& row, std::size_t line) {
    RawUser u;
    u.user_id = require_int(row, "Id", line);
    u.reputation = optional_int(row, "Reputation", line).value_or(1);
    if (u.reputation < 0) throw ParseError("negative reputation", line);
    u.display_name = attr_or_empty(row, "DisplayName");
    users[u.user_id] = std::move(u);
  });
  return users;
}

struct HistoryRow {
  Id id;
  int type;
  Id post_id;
  std::string revision_guid;
  Timestamp ts;
  std::optional<Id> user_id;
  std::string text;
};

struct HistoryPart {
  std::map<Id, std::vector<PostEditEvent>> edits;
  std::size_t events = 0;
  std::size_t ignored = 0;
};

HistoryPart parse_history(std::istream& in) {
  std::vector<HistoryRow> rows;
  HistoryPart part;
  read_dump_rows(in, [&](const XmlRow& row, std::size_t line) {
    const auto type = static_cast<int>(require_int(row, "PostHistoryTypeId", line));
    if (type != kInitialBody && type != kEditBody && type != kRollbackBody) {
      ++part.ignored;
      return;
    }
    rows.push_back(HistoryRow{require_int(row, "Id", line), type,
                              require_int(row, "PostId", line),
                              attr_or_empty(row, "RevisionGUID"),
                              require_ts(row, "CreationDate", line),
                              optional_int(row, "UserId", line),
                              attr_or_empty(row, "Text")});
  });
  std::sort(rows.begin(), rows.end(), [](const HistoryRow& a, const HistoryRow& b) {
    return std::tie(a.post_id, a.ts, a.id) < std::tie(b.post_id, b.ts, b.id);
  });
  std::unordered_map<std::string, std::string> body_by_revision;
  for (const HistoryRow& r : rows) {
    std::string body = r.text;
    // Rollback rows may carry the GUID of the revision they restore.
    if (r.type == kRollbackBody && looks_like_guid(body)) {
      auto it = body_by_revision.find(body);
      if (it != body_by_revision.end()) body = it->second;
    }
    if (!r.revision_guid.empty()) body_by_revision[r.revision_guid] = body;
    part.edits[r.post_id].push_back(
        PostEditEvent{r.post_id, r.user_id, r.ts, std::move(body)});
    ++part.events;
  }
  return part;
}

RawCorpus assemble(PostsPart posts, std::vector<RawComment> comments,
                   std::map<Id, RawUser> users, HistoryPart history) {
  RawCorpus corpus;
  corpus.posts = std::move(posts.posts);
  std::sort(corpus.posts.begin(), corpus.posts.end(),
            [](const RawPost& a, const RawPost& b) { return a.post_id < b.post_id; });
  corpus.comments = std::move(comments);
  std::sort(corpus.comments.begin(), corpus.comments.end(),
            [](const RawComment& a, const RawComment& b) {
              return std::tie(a.post_id, a.creation_ts, a.comment_id) <
                     std::tie(b.post_id, b.creation_ts, b.comment_id);
            });
  corpus.users = std::move(users);
  corpus.edits = std::move(history.edits);
  auto& s = corpus.summary;
  for (const RawPost& p : corpus.posts) {
    (p.post_type == PostType::kQuestion ? s.questions : s.answers)++;
  }
  s.comments = corpus.comments.size();
  s.users = corpus.users.size();
  s.edit_events = history.events;
  s.skipped_post_types = posts.skipped;
  s.ignored_history_rows = history.ignored;
  return corpus;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

Timestamp AnswerThread::last_activity() const {
  Timestamp last = answer.creation_ts;
  for (const PostEditEvent& e : edits) last = std::max(last, e.edit_ts);
  return last;
}

const RawUser* AnswerThread::find_user(std::optional<Id> id) const {
  if (!id) return nullptr;
  auto it = users.find(*id);
  return it == users.end() ? nullptr : &it->second;
}

RawCorpus parse_dump(std::istream& posts, std::istream& comments,
                     std::istream& users, std::istream& history) {
  return assemble(parse_posts(posts), parse_comments(comments),
                  parse_users(users), parse_history(history));
}

RawCorpus parse_dump(const DumpFiles& files) {
  auto with_file = [](const std::filesystem::path& path, auto parse) {
    std::ifstream in = open_input(path);
    try {
      return parse(in);
    } catch (const ParseError& e) {
      throw Error(path.string() + ": " + e.what());
    }
  };
  auto posts = std::async(std::launch::async, [&] {
    return with_file(files.posts, parse_posts);
  });
  auto comments = std::async(std::launch::async, [&] {
    return with_file(files.comments, parse_comments);
  });
  auto users = std::async(std::launch::async, [&] {
    return with_file(files.users, parse_users);
  });
  auto history = std::async(std::launch::async, [&] {
    return with_file(files.history, parse_history);
  });
  return assemble(posts.get(), comments.get(), users.get(), history.get());
}

std::vector<AnswerThread> select_answers(const RawCorpus& corpus,
                                         std::string_view tag,
                                         Timestamp cutoff) {
  std::map<Id, const RawPost*> questions;
  std::map<Id, std::vector<const RawPost*>> answers_by_question;
  for (const RawPost& p : corpus.posts) {
    if (p.post_type == PostType::kQuestion) {
      questions[p.post_id] = &p;
    } else {
      answers_by_question[*p.parent_id].push_back(&p);
    }
  }
  std::map<Id, std::vector<const RawComment*>> comments_by_post;
  for (const RawComment& c : corpus.comments) comments_by_post[c.post_id].push_back(&c);

  std::vector<AnswerThread> threads;
  for (const auto& [qid, answers] : answers_by_question) {
    auto qit = questions.find(qid);
    if (qit == questions.end()) continue;
    const RawPost& question = *qit->second;
    if (question.score < 0) continue;
    if (std::find(question.tags.begin(), question.tags.end(), tag) ==
        question.tags.end()) {
      continue;
    }
    // answers are in post_id order because corpus.posts is.
    const RawPost* accepted = nullptr;
    const RawPost* top = nullptr;
    for (const RawPost* a : answers) {
      const bool is_accepted = question.accepted_answer_id == a->post_id;
      if (is_accepted) accepted = a;
      if (top == nullptr || a->score > top->score ||
          (a->score == top->score && is_accepted)) {
        top = a;
      }
    }
    std::vector<const RawPost*> picked;
    if (accepted != nullptr) picked.push_back(accepted);
    if (top != accepted) picked.push_back(top);

    for (const RawPost* a : picked) {
      auto cit = comments_by_post.find(a->post_id);
      if (cit == comments_by_post.end() || cit->second.empty()) continue;

      AnswerThread t;
      t.question = question;
      t.answer = *a;
      for (const RawComment* c : cit->second) t.comments.push_back(*c);
      if (auto eit = corpus.edits.find(a->post_id); eit != corpus.edits.end()) {
        t.edits = eit->second;
      }
      if (t.edits.empty() || t.edits.front().edit_ts != a->creation_ts) {
        // History without an initial-body row: synthesize the creation event.
        const std::string& body =
            t.edits.empty() ? a->body : t.edits.front().body_after;
        t.edits.insert(t.edits.begin(),
                       PostEditEvent{a->post_id, a->owner_user_id, a->creation_ts, body});
      }
      if (t.last_activity() < cutoff) continue;

      std::set<Id> user_ids;
      auto note = [&](std::optional<Id> id) {
        if (id) user_ids.insert(*id);
      };
      note(question.owner_user_id);
      note(a->owner_user_id);
      for (const RawComment& c : t.comments) note(c.owner_user_id);
      for (const PostEditEvent& e : t.edits) note(e.editor_user_id);
      for (Id id : user_ids) {
        if (auto uit = corpus.users.find(id); uit != corpus.users.end()) {
          t.users.emplace(id, uit->second);
        }
      }
      threads.push_back(std::move(t));
    }
  }
  std::sort(threads.begin(), threads.end(), [](const AnswerThread& a, const AnswerThread& b) {
    return a.answer.post_id < b.answer.post_id;
  });
  return threads;
}

std::vector<AnswerThread> sample_answers(std::span<const AnswerThread> threads,
                                         std::size_t n, std::uint64_t seed) {
  if (n > threads.size()) {
    throw ArgumentError("sample size " + std::to_string(n) + " exceeds pool of " +
                        std::to_string(threads.size()));
  }
  std::vector<const AnswerThread*> pool;
  pool.reserve(threads.size());
  for (const AnswerThread& t : threads) pool.push_back(&t);
  std::sort(pool.begin(), pool.end(), [](const AnswerThread* a, const AnswerThread* b) {
    return a->answer.post_id < b->answer.post_id;
  });
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  std::sort(pool.begin(), pool.end(), [](const AnswerThread* a, const AnswerThread* b) {
    return a->answer.post_id < b->answer.post_id;
  });
  std::vector<AnswerThread> out;
  out.reserve(n);
  for (const AnswerThread* t : pool) out.push_back(*t);
  return out;
}

// ---- JSON-lines serialization ----

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

json post_to_json(const RawPost& p) {
  json j;
  j["id"] = p.post_id;
  j["type"] = p.post_type == PostType::kQuestion ? "question" : "answer";
  put_optional(j, "parent_id", p.parent_id);
  put_optional(j, "accepted_answer_id", p.accepted_answer_id);
  put_optional(j, "owner_user_id", p.owner_user_id);
  j["score"] = p.score;
  j["created"] = format_timestamp(p.creation_ts);
  j["last_activity"] = format_timestamp(p.last_activity_ts);
  if (p.post_type == PostType::kQuestion) j["tags"] = p.tags;
  j["body"] = p.body;
  return j;
}

RawPost post_from_json(const json& j) {
  RawPost p;
  p.post_id = j.at("id").get<Id>();
  const std::string type = j.at("type").get<std::string>();
  if (type == "question") {
    p.post_type = PostType::kQuestion;
  } else if (type == "answer") {
    p.post_type = PostType::kAnswer;
  } else {
    throw ValidationError("unknown post type '" + type + "'");
  }
  p.parent_id = get_optional<Id>(j, "parent_id");
  p.accepted_answer_id = get_optional<Id>(j, "accepted_answer_id");
  p.owner_user_id = get_optional<Id>(j, "owner_user_id");
  p.score = j.at("score").get<std::int64_t>();
  p.creation_ts = parse_timestamp(j.at("created").get<std::string>());
  p.last_activity_ts = parse_timestamp(j.at("last_activity").get<std::string>());
  if (auto it = j.find("tags"); it != j.end()) {
    p.tags = it->get<std::vector<std::string>>();
  }
  p.body = j.at("body").get<std::string>();
  return p;
}

}  // namespace

std::string thread_to_json_line(const AnswerThread& t) {
  json j;
  j["question"] = post_to_json(t.question);
  j["answer"] = post_to_json(t.answer);
  json comments = json::array();
  for (const RawComment& c : t.comments) {
    json jc;
    jc["id"] = c.comment_id;
    jc["post_id"] = c.post_id;
    put_optional(jc, "owner_user_id", c.owner_user_id);
    jc["score"] = c.score;
    jc["created"] = format_timestamp(c.creation_ts);
    jc["text"] = c.text;
    put_optional(jc, "user_display_name", c.user_display_name);
    comments.push_back(std::move(jc));
  }
  j["comments"] = std::move(comments);
  json edits = json::array();
  for (const PostEditEvent& e : t.edits) {
    json je;
    je["post_id"] = e.post_id;
    put_optional(je, "editor_user_id", e.editor_user_id);
    je["ts"] = format_timestamp(e.edit_ts);
    je["body_after"] = e.body_after;
    edits.push_back(std::move(je));
  }
  j["edits"] = std::move(edits);
  json users = json::array();
  for (const auto& [id, u] : t.users) {
    users.push_back({{"id", u.user_id},
                     {"reputation", u.reputation},
                     {"display_name", u.display_name}});
  }
  j["users"] = std::move(users);
  return j.dump();
}

AnswerThread thread_from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("bad corpus line: ") + e.what());
  }
  try {
    AnswerThread t;
    t.question = post_from_json(j.at("question"));
    t.answer = post_from_json(j.at("answer"));
    for (const json& jc : j.at("comments")) {
      RawComment c;
      c.comment_id = jc.at("id").get<Id>();
      c.post_id = jc.at("post_id").get<Id>();
      c.owner_user_id = get_optional<Id>(jc, "owner_user_id");
      c.score = jc.at("score").get<std::int64_t>();
      c.creation_ts = parse_timestamp(jc.at("created").get<std::string>());
      c.text = jc.at("text").get<std::string>();
      c.user_display_name = get_optional<std::string>(jc, "user_display_name");
      t.comments.push_back(std::move(c));
    }
    for (const json& je : j.at("edits")) {
      PostEditEvent e;
      e.post_id = je.at("post_id").get<Id>();
      e.editor_user_id = get_optional<Id>(je, "editor_user_id");
      e.edit_ts = parse_timestamp(je.at("ts").get<std::string>());
      e.body_after = je.at("body_after").get<std::string>();
      t.edits.push_back(std::move(e));
    }
    for (const json& ju : j.at("users")) {
      RawUser u{ju.at("id").get<Id>(), ju.at("reputation").get<std::int64_t>(),
                ju.at("display_name").get<std::string>()};
      t.users.emplace(u.user_id, std::move(u));
    }
    return t;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad corpus record: ") + e.what());
  }
}

void write_threads(std::ostream& out, std::span<const AnswerThread> threads) {
  for (const AnswerThread& t : threads) out << thread_to_json_line(t) << '\n';
}

std::vector<AnswerThread> read_threads(std::istream& in) {
  std::vector<AnswerThread> threads;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      threads.push_back(thread_from_json_line(line));
    } catch (const Error& e) {
      throw ValidationError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return threads;
}

std::vector<AnswerThread> read_threads(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_threads(in);
}

}  // namespace urcminer
