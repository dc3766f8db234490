#include "urcminer/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace urcminer {
namespace {

const std::vector<std::string> kHeader = {"question_id", "answer_id", "comment_id",
                                          "needs_update", "addressed_in",
                                          "addressed_by_comment_id"};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<Id> parse_id(const std::string& s) {
  Id v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct CommentRef {
  Id question_id;
  Id answer_id;
  std::size_t position;  // index within the thread's ordered comments
};

}  // namespace

std::string_view to_string(AddressedIn a) {
  switch (a) {
    case AddressedIn::kComment: return "comment";
    case AddressedIn::kPost: return "post";
    case AddressedIn::kBoth: return "both";
    case AddressedIn::kNo: return "no";
    case AddressedIn::kNone: return "";
  }
  return "";
}

std::vector<std::string> class_names(ClassScheme scheme) {
  if (scheme == ClassScheme::kBinary) return {"NO_URC", "URC"};
  return {"NO_URC", "URC_ADDRESSED", "URC_UNADDRESSED"};
}

int class_index(const AnnotatedComment& a, ClassScheme scheme) {
  if (!a.needs_update) return 0;
  if (scheme == ClassScheme::kBinary) return 1;
  return a.addressed() ? 1 : 2;
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in.peek() == '\n') in.get(c);
      row.push_back(std::move(field));
      field.clear();
      if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (in_quotes) throw ValidationError("unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AnnotatedComment> load_annotations(std::istream& in,
                                               std::span<const AnswerThread> threads) {
  const auto rows = read_csv(in);
  std::vector<AnnotatedComment> out;
  if (rows.empty()) return out;

  std::vector<std::string> header;
  for (const auto& h : rows[0]) header.push_back(trim(h));
  if (header != kHeader) {
    throw ValidationError(
        "annotation header must be question_id,answer_id,comment_id,needs_update,"
        "addressed_in,addressed_by_comment_id");
  }

  std::map<Id, CommentRef> comments;
  for (const AnswerThread& t : threads) {
    for (std::size_t i = 0; i < t.comments.size(); ++i) {
      comments.emplace(t.comments[i].comment_id,
                       CommentRef{t.question.post_id, t.answer.post_id, i});
    }
  }

  std::vector<std::string> problems;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::vector<std::string> f;
    for (const auto& v : rows[r]) f.push_back(trim(v));
    const std::string where = "row " + std::to_string(r + 1) + ": ";
    if (f.size() == 5) f.emplace_back();  // trailing blank column dropped
    if (f.size() != 6) {
      problems.push_back(where + "expected 6 columns, got " + std::to_string(f.size()));
      continue;
    }
    AnnotatedComment a;
    const auto qid = parse_id(f[0]);
    const auto aid = parse_id(f[1]);
    const auto cid = parse_id(f[2]);
    if (!qid || !aid || !cid) {
      problems.push_back(where + "non-integer id");
      continue;
    }
    a.question_id = *qid;
    a.answer_id = *aid;
    a.comment_id = *cid;

    std::string nu = f[3];
    std::transform(nu.begin(), nu.end(), nu.begin(), ::tolower);
    if (nu == "yes") {
      a.needs_update = true;
    } else if (nu == "no") {
      a.needs_update = false;
    } else {
      problems.push_back(where + "needs_update must be yes|no, got '" + f[3] + "'");
      continue;
    }

    std::string ai = f[4];
    std::transform(ai.begin(), ai.end(), ai.begin(), ::tolower);
    if (ai == "comment") a.addressed_in = AddressedIn::kComment;
    else if (ai == "post") a.addressed_in = AddressedIn::kPost;
    else if (ai == "both") a.addressed_in = AddressedIn::kBoth;
    else if (ai == "no") a.addressed_in = AddressedIn::kNo;
    else if (ai.empty() || ai == "-") a.addressed_in = AddressedIn::kNone;
    else {
      problems.push_back(where + "unknown addressed_in '" + f[4] + "'");
      continue;
    }

    if (!f[5].empty() && f[5] != "-") {
      a.addressed_by_comment_id = parse_id(f[5]);
      if (!a.addressed_by_comment_id) {
        problems.push_back(where + "non-integer addressed_by_comment_id");
        continue;
      }
    }

    if (!a.needs_update && a.addressed_in != AddressedIn::kNone) {
      problems.push_back(where + "needs_update=no requires blank addressed_in, got '" +
                         std::string(to_string(a.addressed_in)) + "'");
      continue;
    }
    if (a.needs_update && a.addressed_in == AddressedIn::kNone) {
      problems.push_back(where + "needs_update=yes requires addressed_in");
      continue;
    }
    if (a.in_comment() != a.addressed_by_comment_id.has_value()) {
      problems.push_back(where + "addressed_by_comment_id must be present iff "
                                 "addressed_in is comment or both");
      continue;
    }

    auto it = comments.find(a.comment_id);
    if (it == comments.end()) {
      problems.push_back(where + "dangling comment_id " + std::to_string(a.comment_id));
      continue;
    }
    if (it->second.answer_id != a.answer_id || it->second.question_id != a.question_id) {
      problems.push_back(where + "comment " + std::to_string(a.comment_id) +
                         " does not belong to answer " + std::to_string(a.answer_id));
      continue;
    }
    if (a.addressed_by_comment_id) {
      auto by = comments.find(*a.addressed_by_comment_id);
      if (by == comments.end()) {
        problems.push_back(where + "dangling addressed_by_comment_id " +
                           std::to_string(*a.addressed_by_comment_id));
        continue;
      }
      if (by->second.answer_id != a.answer_id ||
          by->second.position <= it->second.position) {
        problems.push_back(where + "addressing comment " +
                           std::to_string(*a.addressed_by_comment_id) +
                           " is not a later comment on the same answer");
        continue;
      }
    }
    out.push_back(a);
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << problems.size() << " invalid annotation row(s):";
    for (const auto& p : problems) msg << "\n  " << p;
    throw ValidationError(msg.str());
  }
  return out;
}

std::vector<AnnotatedComment> load_annotations(const std::filesystem::path& path,
                                               std::span<const AnswerThread> threads) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return load_annotations(in, threads);
}

void write_annotations(std::ostream& out, std::span<const AnnotatedComment> rows) {
  out << "question_id,answer_id,comment_id,needs_update,addressed_in,"
         "addressed_by_comment_id\n";
  for (const AnnotatedComment& a : rows) {
    out << a.question_id << ',' << a.answer_id << ',' << a.comment_id << ','
        << (a.needs_update ? "yes" : "no") << ',' << to_string(a.addressed_in) << ',';
    if (a.addressed_by_comment_id) out << *a.addressed_by_comment_id;
    out << '\n';
  }
}

}  // namespace urcminer
