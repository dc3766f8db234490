#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fixture.hpp"
#include "urcminer/annotations.hpp"
#include "urcminer/empirics.hpp"

using namespace urcminer;

namespace {

const std::vector<AnswerThread>& threads() {
  static const auto t = test::fixture_threads();
  return t;
}

std::vector<AnnotatedComment> fixture_annotations() {
  return load_annotations(test::fixture_dir() / "annotations.csv", threads());
}

std::vector<AnnotatedComment> annotations_from(const std::string& body) {
  std::istringstream in(
      "question_id,answer_id,comment_id,needs_update,addressed_in,addressed_by_comment_id\n" + body);
  return load_annotations(in, threads());
}

}  // namespace

TEST_CASE("prevalence on the fixture") {
  const Prevalence p = prevalence(fixture_annotations());
  CHECK(p.urc.count == 7);
  CHECK(p.urc.of == 10);
  CHECK(*p.urc.percent() == doctest::Approx(70.0));
  CHECK(p.addressed.count == 3);
  CHECK(p.addressed.of == 7);
  CHECK(p.in_comment.count == 2);
  CHECK(p.in_post.count == 2);
  CHECK(p.in_both.count == 1);
  CHECK(p.in_both.of == 3);
}

TEST_CASE("prevalence without URCs leaves later ratios undefined") {
  const auto rows = annotations_from("300,500,701,no,,\n36152972,36155326,60190443,no,,\n");
  const Prevalence p = prevalence(rows);
  CHECK(p.urc.count == 0);
  CHECK(p.urc.of == 2);
  CHECK(*p.urc.percent() == 0.0);
  CHECK_FALSE(p.addressed.percent().has_value());
  CHECK_FALSE(p.in_post.percent().has_value());
  const std::string text = empirics_to_text(compute_empirics(rows, threads()));
  CHECK(text.find("—") != std::string::npos);
  const auto j = nlohmann::json::parse(empirics_to_json(compute_empirics(rows, threads())));
  CHECK(j["prevalence"]["addressed"]["percent"].is_null());
}

TEST_CASE("address latency on the fixture") {
  const LatencyBlock b = address_latency(fixture_annotations(), threads());
  CHECK(b.addressed_total == 3);
  CHECK(b.urc_total == 7);
  CHECK(b.missing_post_edit == 0);
  REQUIRE(b.entries.size() == 3);
  // 700: edit two minutes later.
  CHECK(b.entries[0].comment_id == 700);
  CHECK(*b.entries[0].minutes == 2.0);
  CHECK_FALSE(b.entries[0].comment_minutes.has_value());
  // 60185364: reply after 150 minutes, edit after 145; the earlier one counts.
  CHECK(*b.entries[1].comment_minutes == 150.0);
  CHECK(*b.entries[1].post_minutes == 145.0);
  CHECK(*b.entries[1].minutes == 145.0);
  // 99591573: reply after two hours.
  CHECK(*b.entries[2].minutes == 120.0);

  CHECK(b.within == std::vector<std::size_t>{1, 1, 3, 3, 3});
  CHECK(b.percent_of_addressed[0] == doctest::Approx(100.0 / 3.0));
  CHECK(b.percent_of_addressed[2] == doctest::Approx(100.0));
  CHECK(b.percent_of_all[0] == doctest::Approx(100.0 / 7.0));
  CHECK(b.percent_of_all[4] == doctest::Approx(300.0 / 7.0));
}

TEST_CASE("latency thresholds are inclusive and cumulative") {
  const auto rows = annotations_from("300,500,700,yes,post,\n");
  const std::vector<LatencyThreshold> edges = {{"1 min", 1.0}, {"2 min", 2.0}, {"3 min", 3.0}};
  const LatencyBlock b = address_latency(rows, threads(), edges);
  CHECK(b.within == std::vector<std::size_t>{0, 1, 1});
  const LatencyBlock all = address_latency(fixture_annotations(), threads());
  for (std::size_t t = 1; t < all.within.size(); ++t) CHECK(all.within[t] >= all.within[t - 1]);
  for (std::size_t t = 0; t < all.within.size(); ++t) {
    CHECK(all.percent_of_all[t] <= all.percent_of_addressed[t]);
  }
}

TEST_CASE("post-addressed URC with no later edit is counted, not timed") {
  // 701 comes a minute after the last edit of answer 500.
  const auto rows = annotations_from("300,500,701,yes,post,\n");
  const LatencyBlock b = address_latency(rows, threads());
  CHECK(b.missing_post_edit == 1);
  CHECK(b.addressed_total == 1);
  CHECK_FALSE(b.entries[0].minutes.has_value());
  CHECK(b.within == std::vector<std::size_t>{0, 0, 0, 0, 0});
  CHECK(role_location_matrix(rows, threads()).unresolved_post_edits == 1);
}

TEST_CASE("role matrix on the fixture") {
  const RoleMatrix m = role_location_matrix(fixture_annotations(), threads());
  const RoleCounts& owner = m.by_role[static_cast<int>(AddresserRole::kAnswerOwner)];
  CHECK(owner.in_comment == 2);
  CHECK(owner.in_post == 2);
  CHECK(owner.in_either == 3);
  CHECK(owner.in_both == 1);
  CHECK(m.anyone.in_comment == 2);
  CHECK(m.anyone.in_either == 3);
  for (int r = 1; r < 4; ++r) CHECK(m.by_role[r].in_either == 0);
}

TEST_CASE("role matrix: editor, questioner and others") {
  const auto rows = annotations_from(
      "300,500,700,yes,post,\n"
      "27304556,27304654,43072230,yes,comment,43073707\n"
      "27304556,27304654,43072237,yes,comment,76939452\n"
      "27304556,27304654,43073707,no,,\n"
      "27304556,27304654,76939452,no,,\n"
      "36152972,36155326,60185364,yes,both,60190443\n"
      "36152972,36155326,99591573,yes,post,\n");
  const RoleMatrix m = role_location_matrix(rows, threads());
  auto row = [&](AddresserRole r) { return m.by_role[static_cast<int>(r)]; };
  CHECK(row(AddresserRole::kAnswerOwner).in_comment == 1);
  CHECK(row(AddresserRole::kAnswerOwner).in_post == 2);
  CHECK(row(AddresserRole::kAnswerOwner).in_either == 2);
  CHECK(row(AddresserRole::kAnswerOwner).in_both == 1);
  // The 2019 edit of 36155326 is by someone other than the owner.
  CHECK(row(AddresserRole::kAnswerEditor).in_post == 1);
  CHECK(row(AddresserRole::kAnswerEditor).in_comment == 0);
  CHECK(row(AddresserRole::kQuestioner).in_comment == 1);
  CHECK(row(AddresserRole::kQuestioner).in_post == 0);
  CHECK(row(AddresserRole::kOther).in_comment == 1);
  CHECK(m.anyone.in_comment == 3);
  CHECK(m.anyone.in_post == 3);
  CHECK(m.anyone.in_either == 5);
  CHECK(m.anyone.in_both == 1);
  // Roles never exceed the per-URC totals.
  std::size_t either = 0;
  for (const auto& r : m.by_role) either += r.in_either;
  CHECK(either >= m.anyone.in_either);
}

TEST_CASE("nearest-rank and interpolated quantiles") {
  const std::vector<std::int64_t> v{0, 0, 1, 1, 2, 2, 3};
  CHECK(nearest_rank_quantile(v, 0.50) == 1);
  CHECK(nearest_rank_quantile(v, 0.75) == 2);
  CHECK(nearest_rank_quantile(v, 0.90) == 3);
  CHECK(interpolated_quantile(v, 0.50) == 1.0);
  CHECK(interpolated_quantile(v, 0.75) == doctest::Approx(2.0));
  CHECK(interpolated_quantile(v, 0.95) == doctest::Approx(2.7));
  const std::vector<std::int64_t> five{1, 2, 3, 4, 5};
  CHECK(nearest_rank_quantile(five, 0.80) == 4);  // 0.8 * 5 is 4 up to rounding
  CHECK(nearest_rank_quantile(five, 0.81) == 5);
  const std::vector<std::int64_t> single{7};
  CHECK(nearest_rank_quantile(single, 0.5) == 7);
  CHECK(interpolated_quantile(single, 0.95) == 7.0);
  CHECK(nearest_rank_quantile(std::span<const std::int64_t>{}, 0.5) == 0);
}

TEST_CASE("nearest-rank quantile is a member and monotone in p") {
  std::vector<std::int64_t> v;
  for (int i = 0; i < 37; ++i) v.push_back((i * 7919) % 13 - 3);
  std::sort(v.begin(), v.end());
  std::int64_t prev = v.front();
  for (double p = 0.01; p < 1.0; p += 0.01) {
    const std::int64_t q = nearest_rank_quantile(v, p);
    CHECK(std::binary_search(v.begin(), v.end(), q));
    CHECK(q >= prev);
    prev = q;
    // At least ceil(p·n) values are at or below q.
    const auto at_or_below = std::upper_bound(v.begin(), v.end(), q) - v.begin();
    CHECK(static_cast<double>(at_or_below) >= p * static_cast<double>(v.size()) - 1e-9);
  }
}

TEST_CASE("score quantiles on the fixture") {
  const ScoreQuantiles q = score_quantiles(fixture_annotations(), threads());
  CHECK(q.urc_n == 7);
  CHECK(q.no_urc_n == 3);
  CHECK(q.urc == std::vector<std::int64_t>{1, 2, 2, 2, 3, 3});
  CHECK(q.no_urc == std::vector<std::int64_t>{0, 0, 0, 0, 0, 0});
  const std::vector<double> bad{0.5, 1.0};
  CHECK_THROWS_AS(score_quantiles(fixture_annotations(), threads(), bad), ArgumentError);
}

TEST_CASE("empirics report output") {
  const EmpiricsReport r = compute_empirics(fixture_annotations(), threads());
  const auto j = nlohmann::json::parse(empirics_to_json(r));
  CHECK(j["prevalence"]["urc"]["count"] == 7);
  CHECK(j["latency"]["per_urc"].size() == 3);
  CHECK(j["roles"]["answer owner"]["in_both"] == 1);
  CHECK(j["score_quantiles"]["URC"][4] == 3);
  const std::string text = empirics_to_text(r);
  CHECK(text.find("7 of 10") != std::string::npos);
  CHECK(text.find("by answer owner") != std::string::npos);
  CHECK(empirics_to_text(compute_empirics(fixture_annotations(), threads())) == text);
}

TEST_CASE("annotations referring to comments outside the corpus are rejected") {
  CHECK_THROWS_AS(annotations_from("300,500,123456,yes,no,\n"), ValidationError);
}
