#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urcminer/corpus.hpp"

namespace urcminer {

enum class AddressedIn { kComment, kPost, kBoth, kNo, kNone };

std::string_view to_string(AddressedIn a);

struct AnnotatedComment {
  Id question_id = 0;
  Id answer_id = 0;
  Id comment_id = 0;
  bool needs_update = false;
  AddressedIn addressed_in = AddressedIn::kNone;
  std::optional<Id> addressed_by_comment_id;

  bool is_urc() const { return needs_update; }
  bool addressed() const {
    return addressed_in == AddressedIn::kComment ||
           addressed_in == AddressedIn::kPost || addressed_in == AddressedIn::kBoth;
  }
  bool in_comment() const {
    return addressed_in == AddressedIn::kComment || addressed_in == AddressedIn::kBoth;
  }
  bool in_post() const {
    return addressed_in == AddressedIn::kPost || addressed_in == AddressedIn::kBoth;
  }

  bool operator==(const AnnotatedComment&) const = default;
};

// Label schemes used for training.
enum class ClassScheme { kBinary, kThreeClass };

std::vector<std::string> class_names(ClassScheme scheme);
// Index into class_names(scheme).
int class_index(const AnnotatedComment& a, ClassScheme scheme);

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

// Reads the annotation CSV and joins every row to a comment of `threads`.
// All offending rows are collected into a single ValidationError.
std::vector<AnnotatedComment> load_annotations(std::istream& in,
                                               std::span<const AnswerThread> threads);
std::vector<AnnotatedComment> load_annotations(const std::filesystem::path& path,
                                               std::span<const AnswerThread> threads);

void write_annotations(std::ostream& out, std::span<const AnnotatedComment> rows);

}  // namespace urcminer
