#include "urcminer/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

namespace urcminer {
namespace {

struct Located {
  const AnswerThread* thread = nullptr;
  std::size_t index = 0;
};

class CommentIndex {
 public:
  explicit CommentIndex(std::span<const AnswerThread> threads) {
    for (const AnswerThread& t : threads) {
      for (std::size_t i = 0; i < t.comments.size(); ++i) {
        index_[t.comments[i].comment_id] = Located{&t, i};
      }
    }
  }

  const Located& at(Id comment_id) const {
    auto it = index_.find(comment_id);
    if (it == index_.end()) {
      throw ValidationError("comment " + std::to_string(comment_id) + " not found in corpus");
    }
    return it->second;
  }

 private:
  std::map<Id, Located> index_;
};

const RawComment& comment_of(const Located& l) { return l.thread->comments[l.index]; }

// First body edit strictly after `ts`.
const PostEditEvent* first_edit_after(const AnswerThread& t, Timestamp ts) {
  for (const PostEditEvent& e : t.edits) {
    if (e.edit_ts > ts) return &e;
  }
  return nullptr;
}

bool same_user(std::optional<Id> a, std::optional<Id> b) { return a && b && *a == *b; }

AddresserRole comment_role(const AnswerThread& t, std::optional<Id> author) {
  if (same_user(author, t.answer.owner_user_id)) return AddresserRole::kAnswerOwner;
  for (std::size_t i = 1; i < t.edits.size(); ++i) {
    if (same_user(author, t.edits[i].editor_user_id)) return AddresserRole::kAnswerEditor;
  }
  if (same_user(author, t.question.owner_user_id)) return AddresserRole::kQuestioner;
  return AddresserRole::kOther;
}

AddresserRole post_role(const AnswerThread& t, const PostEditEvent& e) {
  return same_user(e.editor_user_id, t.answer.owner_user_id) ? AddresserRole::kAnswerOwner
                                                             : AddresserRole::kAnswerEditor;
}

double pct(std::size_t count, std::size_t of) {
  return of == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(of);
}

std::string fmt_ratio(const Ratio& r) {
  char buf[64];
  if (auto p = r.percent()) {
    std::snprintf(buf, sizeof(buf), "%6zu of %-6zu %5.1f%%", r.count, r.of, *p);
  } else {
    std::snprintf(buf, sizeof(buf), "%6zu of %-6zu %8s", r.count, r.of, "—");
  }
  return buf;
}

nlohmann::json ratio_json(const Ratio& r) {
  auto p = r.percent();
  return {{"count", r.count}, {"of", r.of},
          {"percent", p ? nlohmann::json(*p) : nlohmann::json(nullptr)}};
}

nlohmann::json role_json(const RoleCounts& c) {
  return {{"in_comment", c.in_comment},
          {"in_post", c.in_post},
          {"in_either", c.in_either},
          {"in_both", c.in_both}};
}

}  // namespace

std::optional<double> Ratio::percent() const {
  if (of == 0) return std::nullopt;
  return pct(count, of);
}

Prevalence prevalence(std::span<const AnnotatedComment> annotated) {
  Prevalence p;
  std::size_t urc = 0, addressed = 0, in_comment = 0, in_post = 0, both = 0;
  for (const AnnotatedComment& a : annotated) {
    if (!a.is_urc()) continue;
    ++urc;
    if (!a.addressed()) continue;
    ++addressed;
    in_comment += a.in_comment();
    in_post += a.in_post();
    both += a.addressed_in == AddressedIn::kBoth;
  }
  p.urc = {urc, annotated.size()};
  p.addressed = {addressed, urc};
  p.in_comment = {in_comment, addressed};
  p.in_post = {in_post, addressed};
  p.in_both = {both, addressed};
  return p;
}

std::vector<LatencyThreshold> default_latency_thresholds() {
  return {{"5 min", 5.0},
          {"1 hour", 60.0},
          {"1 day", 1440.0},
          {"7 days", 7.0 * 1440.0},
          {"1 year", 365.0 * 1440.0}};
}

LatencyBlock address_latency(std::span<const AnnotatedComment> annotated,
                             std::span<const AnswerThread> threads,
                             std::vector<LatencyThreshold> thresholds) {
  const CommentIndex index(threads);
  LatencyBlock b;
  b.thresholds = std::move(thresholds);
  b.within.assign(b.thresholds.size(), 0);
  for (const AnnotatedComment& a : annotated) {
    if (!a.is_urc()) continue;
    ++b.urc_total;
    if (!a.addressed()) continue;
    ++b.addressed_total;
    const Located& loc = index.at(a.comment_id);
    const Timestamp urc_ts = comment_of(loc).creation_ts;
    UrcLatency e;
    e.comment_id = a.comment_id;
    if (a.in_comment()) {
      const Located& by = index.at(*a.addressed_by_comment_id);
      e.comment_minutes = minutes_between(urc_ts, comment_of(by).creation_ts);
    }
    if (a.in_post()) {
      if (const PostEditEvent* edit = first_edit_after(*loc.thread, urc_ts)) {
        e.post_minutes = minutes_between(urc_ts, edit->edit_ts);
      } else {
        ++b.missing_post_edit;
      }
    }
    if (e.comment_minutes && e.post_minutes) {
      e.minutes = std::min(*e.comment_minutes, *e.post_minutes);
    } else if (e.comment_minutes) {
      e.minutes = e.comment_minutes;
    } else {
      e.minutes = e.post_minutes;
    }
    if (e.minutes) {
      for (std::size_t t = 0; t < b.thresholds.size(); ++t) {
        if (*e.minutes <= b.thresholds[t].minutes) ++b.within[t];
      }
    }
    b.entries.push_back(e);
  }
  for (std::size_t t = 0; t < b.thresholds.size(); ++t) {
    b.percent_of_addressed.push_back(pct(b.within[t], b.addressed_total));
    b.percent_of_all.push_back(pct(b.within[t], b.urc_total));
  }
  return b;
}

std::string_view to_string(AddresserRole role) {
  switch (role) {
    case AddresserRole::kAnswerOwner: return "answer owner";
    case AddresserRole::kAnswerEditor: return "answer editor";
    case AddresserRole::kQuestioner: return "questioner";
    case AddresserRole::kOther: return "others";
  }
  return "";
}

RoleMatrix role_location_matrix(std::span<const AnnotatedComment> annotated,
                                std::span<const AnswerThread> threads) {
  const CommentIndex index(threads);
  RoleMatrix m;
  for (const AnnotatedComment& a : annotated) {
    if (!a.is_urc() || !a.addressed()) continue;
    const Located& loc = index.at(a.comment_id);
    const AnswerThread& t = *loc.thread;
    std::optional<AddresserRole> by_comment, by_post;
    if (a.in_comment()) {
      by_comment = comment_role(t, comment_of(index.at(*a.addressed_by_comment_id)).owner_user_id);
      ++m.anyone.in_comment;
    }
    if (a.in_post()) {
      ++m.anyone.in_post;
      if (const PostEditEvent* e = first_edit_after(t, comment_of(loc).creation_ts)) {
        by_post = post_role(t, *e);
      } else {
        ++m.unresolved_post_edits;
      }
    }
    ++m.anyone.in_either;
    if (a.addressed_in == AddressedIn::kBoth) ++m.anyone.in_both;
    for (std::size_t r = 0; r < m.by_role.size(); ++r) {
      const auto role = static_cast<AddresserRole>(r);
      const bool c = by_comment == role;
      const bool p = by_post == role;
      RoleCounts& row = m.by_role[r];
      row.in_comment += c;
      row.in_post += p;
      row.in_either += c || p;
      row.in_both += c && p;
    }
  }
  return m;
}

std::int64_t nearest_rank_quantile(std::span<const std::int64_t> sorted, double p) {
  if (sorted.empty()) return 0;
  // The epsilon keeps p·n that lands a rounding error above an integer
  // (0.8·5 = 4.000…01) on that integer.
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double interpolated_quantile(std::span<const std::int64_t> sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return static_cast<double>(sorted[lo]) +
         (h - static_cast<double>(lo)) * static_cast<double>(sorted[hi] - sorted[lo]);
}

ScoreQuantiles score_quantiles(std::span<const AnnotatedComment> annotated,
                               std::span<const AnswerThread> threads,
                               std::span<const double> probs) {
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError("quantile probabilities must lie in (0, 1)");
  }
  const CommentIndex index(threads);
  std::vector<std::int64_t> urc, no_urc;
  for (const AnnotatedComment& a : annotated) {
    const std::int64_t score = comment_of(index.at(a.comment_id)).score;
    (a.is_urc() ? urc : no_urc).push_back(score);
  }
  std::sort(urc.begin(), urc.end());
  std::sort(no_urc.begin(), no_urc.end());
  ScoreQuantiles q;
  q.probs.assign(probs.begin(), probs.end());
  q.urc_n = urc.size();
  q.no_urc_n = no_urc.size();
  for (double p : probs) {
    q.urc.push_back(nearest_rank_quantile(urc, p));
    q.no_urc.push_back(nearest_rank_quantile(no_urc, p));
    q.urc_interpolated.push_back(interpolated_quantile(urc, p));
    q.no_urc_interpolated.push_back(interpolated_quantile(no_urc, p));
  }
  return q;
}

EmpiricsReport compute_empirics(std::span<const AnnotatedComment> annotated,
                                std::span<const AnswerThread> threads) {
  return EmpiricsReport{prevalence(annotated), address_latency(annotated, threads),
                        role_location_matrix(annotated, threads),
                        score_quantiles(annotated, threads)};
}

std::string empirics_to_json(const EmpiricsReport& r) {
  using nlohmann::json;
  json j;
  const Prevalence& p = r.prevalence;
  j["prevalence"] = {{"urc", ratio_json(p.urc)},
                     {"addressed", ratio_json(p.addressed)},
                     {"addressed_in_comment", ratio_json(p.in_comment)},
                     {"addressed_in_post", ratio_json(p.in_post)},
                     {"addressed_in_both", ratio_json(p.in_both)}};
  json lat;
  lat["addressed_total"] = r.latency.addressed_total;
  lat["urc_total"] = r.latency.urc_total;
  lat["missing_post_edit"] = r.latency.missing_post_edit;
  json rows = json::array();
  for (std::size_t t = 0; t < r.latency.thresholds.size(); ++t) {
    rows.push_back({{"within", r.latency.thresholds[t].label},
                    {"minutes", r.latency.thresholds[t].minutes},
                    {"count", r.latency.within[t]},
                    {"percent_of_addressed", r.latency.percent_of_addressed[t]},
                    {"percent_of_all", r.latency.percent_of_all[t]}});
  }
  lat["thresholds"] = std::move(rows);
  json entries = json::array();
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  for (const UrcLatency& e : r.latency.entries) {
    entries.push_back({{"comment_id", e.comment_id},
                       {"minutes", opt(e.minutes)},
                       {"comment_minutes", opt(e.comment_minutes)},
                       {"post_minutes", opt(e.post_minutes)}});
  }
  lat["per_urc"] = std::move(entries);
  j["latency"] = std::move(lat);
  json roles = json::object();
  for (std::size_t i = 0; i < r.roles.by_role.size(); ++i) {
    roles[std::string(to_string(static_cast<AddresserRole>(i)))] = role_json(r.roles.by_role[i]);
  }
  roles["anyone"] = role_json(r.roles.anyone);
  roles["unresolved_post_edits"] = r.roles.unresolved_post_edits;
  j["roles"] = std::move(roles);
  const ScoreQuantiles& q = r.quantiles;
  j["score_quantiles"] = {{"probs", q.probs},
                          {"URC", q.urc},
                          {"NO_URC", q.no_urc},
                          {"URC_interpolated", q.urc_interpolated},
                          {"NO_URC_interpolated", q.no_urc_interpolated},
                          {"URC_n", q.urc_n},
                          {"NO_URC_n", q.no_urc_n}};
  return j.dump(2);
}

std::string empirics_to_text(const EmpiricsReport& r) {
  std::ostringstream out;
  char buf[256];
  const Prevalence& p = r.prevalence;
  out << "URC statistics\n";
  const std::pair<const char*, const Ratio*> prev_rows[] = {
      {"How many comments are URC?", &p.urc},
      {"How many URCs are addressed (post or next comments)?", &p.addressed},
      {"Addressed URCs addressed in the next comments", &p.in_comment},
      {"Addressed URCs addressed in the post body", &p.in_post},
      {"Addressed URCs addressed in both", &p.in_both}};
  for (const auto& [label, ratio] : prev_rows) {
    std::snprintf(buf, sizeof(buf), "  %-55s %s\n", label, fmt_ratio(*ratio).c_str());
    out << buf;
  }

  out << "\nAddressed within    of " << r.latency.addressed_total << " addressed    of "
      << r.latency.urc_total << " URCs\n";
  for (std::size_t t = 0; t < r.latency.thresholds.size(); ++t) {
    std::snprintf(buf, sizeof(buf), "  %-16s %8.1f%%   %8.1f%%\n",
                  r.latency.thresholds[t].label.c_str(), r.latency.percent_of_addressed[t],
                  r.latency.percent_of_all[t]);
    out << buf;
  }
  if (r.latency.missing_post_edit > 0) {
    out << "  (" << r.latency.missing_post_edit
        << " addressed-in-post URC(s) have no later post edit)\n";
  }

  std::snprintf(buf, sizeof(buf), "\n%-20s %10s %8s %10s %8s\n", "URCs addressed", "in comment",
                "in post", "in either", "in both");
  out << buf;
  auto role_line = [&](const std::string& label, const RoleCounts& c) {
    std::snprintf(buf, sizeof(buf), "  %-18s %10zu %8zu %10zu %8zu\n", label.c_str(), c.in_comment,
                  c.in_post, c.in_either, c.in_both);
    out << buf;
  };
  for (std::size_t i = 0; i < r.roles.by_role.size(); ++i) {
    role_line("by " + std::string(to_string(static_cast<AddresserRole>(i))), r.roles.by_role[i]);
  }
  role_line("by anyone", r.roles.anyone);

  const ScoreQuantiles& q = r.quantiles;
  out << "\nComment score quantiles (nearest rank)\n  Category";
  for (double pr : q.probs) {
    std::snprintf(buf, sizeof(buf), " %5.0f%%", 100.0 * pr);
    out << buf;
  }
  out << '\n';
  auto q_line = [&](const char* label, const std::vector<std::int64_t>& v) {
    std::snprintf(buf, sizeof(buf), "  %-8s", label);
    out << buf;
    for (std::int64_t x : v) {
      std::snprintf(buf, sizeof(buf), " %6lld", static_cast<long long>(x));
      out << buf;
    }
    out << '\n';
  };
  q_line("NO_URC", q.no_urc);
  q_line("URC", q.urc);
  return out.str();
}

}  // namespace urcminer
