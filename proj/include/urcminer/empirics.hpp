#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urcminer/annotations.hpp"
#include "urcminer/corpus.hpp"

namespace urcminer {

struct Ratio {
  std::size_t count = 0;
  std::size_t of = 0;
  // Percentage, or nullopt for 0/0 (rendered as "—").
  std::optional<double> percent() const;
};

struct Prevalence {
  Ratio urc;         // of all comments
  Ratio addressed;   // of URCs
  Ratio in_comment;  // of addressed URCs
  Ratio in_post;     // of addressed URCs
  Ratio in_both;     // of addressed URCs
};

Prevalence prevalence(std::span<const AnnotatedComment> annotated);

struct LatencyThreshold {
  std::string label;
  double minutes = 0.0;
};

// 5 min, 1 hour, 1 day, 7 days, 1 year (365 days).
std::vector<LatencyThreshold> default_latency_thresholds();

struct UrcLatency {
  Id comment_id = 0;
  std::optional<double> comment_minutes;  // to the addressing comment
  std::optional<double> post_minutes;     // to the first post edit after the URC
  std::optional<double> minutes;          // min of the two available
};

struct LatencyBlock {
  std::vector<LatencyThreshold> thresholds;
  std::vector<std::size_t> within;  // per threshold, addressed URCs with minutes <= threshold
  std::size_t addressed_total = 0;
  std::size_t urc_total = 0;
  std::vector<double> percent_of_addressed;
  std::vector<double> percent_of_all;
  std::vector<UrcLatency> entries;  // every addressed URC, in annotation order
  // Addressed-in-post URCs whose answer has no later edit.
  std::size_t missing_post_edit = 0;
};

LatencyBlock address_latency(std::span<const AnnotatedComment> annotated,
                             std::span<const AnswerThread> threads,
                             std::vector<LatencyThreshold> thresholds = default_latency_thresholds());

enum class AddresserRole { kAnswerOwner = 0, kAnswerEditor = 1, kQuestioner = 2, kOther = 3 };
std::string_view to_string(AddresserRole role);

struct RoleCounts {
  std::size_t in_comment = 0;
  std::size_t in_post = 0;
  std::size_t in_either = 0;
  std::size_t in_both = 0;
};

struct RoleMatrix {
  std::array<RoleCounts, 4> by_role;  // indexed by AddresserRole
  RoleCounts anyone;                  // counted per URC, not summed over roles
  std::size_t unresolved_post_edits = 0;
};

// Comment addressers are classified answer owner > answer editor (anyone
// who edited the answer body after creation) > questioner > other. Post
// addressers are the editor of the first edit after the URC: owner or not.
RoleMatrix role_location_matrix(std::span<const AnnotatedComment> annotated,
                                std::span<const AnswerThread> threads);

struct ScoreQuantiles {
  std::vector<double> probs;
  std::vector<std::int64_t> urc;     // nearest-rank
  std::vector<std::int64_t> no_urc;  // nearest-rank
  std::vector<double> urc_interpolated;     // linear interpolation fallback
  std::vector<double> no_urc_interpolated;
  std::size_t urc_n = 0;
  std::size_t no_urc_n = 0;
};

inline const std::vector<double> kDefaultQuantiles = {0.50, 0.75, 0.80, 0.85, 0.90, 0.95};

ScoreQuantiles score_quantiles(std::span<const AnnotatedComment> annotated,
                               std::span<const AnswerThread> threads,
                               std::span<const double> probs = kDefaultQuantiles);

// Smallest value with at least ceil(p·n) values at or below it. Input sorted.
std::int64_t nearest_rank_quantile(std::span<const std::int64_t> sorted, double p);
double interpolated_quantile(std::span<const std::int64_t> sorted, double p);

struct EmpiricsReport {
  Prevalence prevalence;
  LatencyBlock latency;
  RoleMatrix roles;
  ScoreQuantiles quantiles;
};

EmpiricsReport compute_empirics(std::span<const AnnotatedComment> annotated,
                                std::span<const AnswerThread> threads);

std::string empirics_to_json(const EmpiricsReport& report);
std::string empirics_to_text(const EmpiricsReport& report);

}  // namespace urcminer
