#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "urcminer/corpus.hpp"

namespace test {

inline std::filesystem::path fixture_dir() { return URCMINER_FIXTURE_DIR; }

inline urcminer::DumpFiles fixture_files() {
  const auto d = fixture_dir();
  return {d / "Posts.xml", d / "Comments.xml", d / "Users.xml", d / "PostHistory.xml"};
}

inline std::vector<urcminer::AnswerThread> fixture_threads() {
  const auto corpus = urcminer::parse_dump(fixture_files());
  return urcminer::select_answers(corpus, "java", urcminer::parse_timestamp("2017-01-01"));
}

inline const urcminer::AnswerThread& thread_of(const std::vector<urcminer::AnswerThread>& ts,
                                               urcminer::Id answer_id) {
  for (const auto& t : ts) {
    if (t.answer.post_id == answer_id) return t;
  }
  throw std::runtime_error("no thread for answer " + std::to_string(answer_id));
}

// Position of a comment within its thread.
inline std::size_t index_of(const urcminer::AnswerThread& t, urcminer::Id comment_id) {
  for (std::size_t i = 0; i < t.comments.size(); ++i) {
    if (t.comments[i].comment_id == comment_id) return i;
  }
  throw std::runtime_error("no comment " + std::to_string(comment_id));
}

}  // namespace test
