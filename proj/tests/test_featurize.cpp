#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "fixture.hpp"
#include "urcminer/features.hpp"
#include "urcminer/sentiment.hpp"
#include "urcminer/text.hpp"

using namespace urcminer;

namespace {

const std::vector<AnswerThread>& threads() {
  static const auto t = test::fixture_threads();
  return t;
}

const AnswerThread& json_thread() { return test::thread_of(threads(), 36155326); }
const AnswerThread& queue_thread() { return test::thread_of(threads(), 27304654); }
const AnswerThread& reader_thread() { return test::thread_of(threads(), 500); }

FeatureVector features_of(const AnswerThread& t, Id comment_id) {
  return featurize_comment(t, test::index_of(t, comment_id), nullptr);
}

const double kSentinel = std::log(1.0 + 5'256'000.0);

// Minimal thread builder for cases the fixture does not cover.
AnswerThread tiny_thread() {
  AnswerThread t;
  t.question.post_id = 1;
  t.question.owner_user_id = 10;
  t.answer.post_id = 2;
  t.answer.post_type = PostType::kAnswer;
  t.answer.owner_user_id = 20;
  t.answer.creation_ts = parse_timestamp("2020-01-01T00:00:00");
  t.edits.push_back({2, 20, t.answer.creation_ts, "<p>Use the parser.</p>"});
  t.users[10] = {10, 5, "Ann Asker"};
  t.users[20] = {20, 77, "Bob"};
  t.users[30] = {30, 9, "Carol Third"};
  return t;
}

RawComment comment(Id id, std::optional<Id> user, const std::string& ts, const std::string& text) {
  RawComment c;
  c.comment_id = id;
  c.post_id = 2;
  c.owner_user_id = user;
  c.creation_ts = parse_timestamp(ts);
  c.text = text;
  return c;
}

}  // namespace

TEST_CASE("resolve_role on the worked example") {
  const AnswerThread& t = json_thread();
  const RoleInfo asker = resolve_role(t, 0);
  CHECK(asker.flags.by_asker);
  CHECK_FALSE(asker.flags.by_answerer);
  CHECK(asker.user_reputation == 50);

  const RoleInfo answerer = resolve_role(t, 1);  // 60190443
  CHECK(answerer.flags.by_answerer);
  CHECK_FALSE(answerer.flags.by_asker);

  const RoleInfo stranger = resolve_role(t, 2);  // 99591573, first comment by 4004
  CHECK(stranger.flags.by_not_seen_commenter);
  CHECK_FALSE(stranger.flags.by_seen_commenter);
  CHECK(stranger.user_reputation == 900);
}

TEST_CASE("resolve_role: seen commenter, self-answer, unknown user") {
  AnswerThread t = tiny_thread();
  t.comments = {comment(1, 30, "2020-01-02T00:00:00", "first"),
                comment(2, 30, "2020-01-02T01:00:00", "second"),
                comment(3, 99, "2020-01-02T02:00:00", "who am I"),
                comment(4, std::nullopt, "2020-01-02T03:00:00", "deleted account"),
                comment(5, std::nullopt, "2020-01-02T04:00:00", "another deleted account")};
  CHECK(resolve_role(t, 0).flags.by_not_seen_commenter);
  CHECK(resolve_role(t, 1).flags.by_seen_commenter);
  CHECK_FALSE(resolve_role(t, 1).flags.by_not_seen_commenter);
  CHECK(resolve_role(t, 2).user_reputation == 1);
  // Anonymous comments are never matched to each other.
  CHECK(resolve_role(t, 4).flags.by_not_seen_commenter);

  t.answer.owner_user_id = 10;  // self-answered question
  t.comments = {comment(1, 10, "2020-01-02T00:00:00", "my own answer")};
  const RoleFlags f = resolve_role(t, 0).flags;
  CHECK(f.by_asker);
  CHECK(f.by_answerer);
  CHECK_FALSE(f.by_seen_commenter);
  CHECK_FALSE(f.by_not_seen_commenter);
}

TEST_CASE("time features") {
  const AnswerThread& t = json_thread();
  const TimeFeatures first = time_features(t, 0);  // 15:00
  CHECK(first.prev_post_edit_time == doctest::Approx(std::log(61.0)));  // creation at 14:00
  CHECK(first.prev_post_edit_time == doctest::Approx(4.1109).epsilon(1e-4));
  CHECK(first.next_post_edit_time == doctest::Approx(std::log(146.0)));  // edit at 17:25
  CHECK(first.prev_comment_time == doctest::Approx(kSentinel));
  CHECK(first.next_comment_time == doctest::Approx(std::log(151.0)));  // reply at 17:30

  const TimeFeatures last = time_features(t, 3);
  CHECK(last.next_comment_time == doctest::Approx(kSentinel));
  CHECK(last.prev_comment_time == doctest::Approx(std::log(121.0)));
  CHECK(last.next_post_edit_time == doctest::Approx(std::log(6.0)));
  CHECK(kSentinel == doctest::Approx(15.475).epsilon(1e-4));
  CHECK(log_minutes(0.0) == 0.0);
  CHECK(log_minutes(-3.0) == 0.0);
}

TEST_CASE("time features: never-edited post and same-instant events") {
  AnswerThread t = tiny_thread();
  t.comments = {comment(1, 30, "2020-01-01T00:00:00", "same instant as creation"),
                comment(2, 10, "2020-01-01T00:00:00", "same instant too")};
  const TimeFeatures a = time_features(t, 0);
  CHECK(a.prev_post_edit_time == 0.0);  // the creation event counts as previous
  CHECK(a.next_post_edit_time == doctest::Approx(kSentinel));
  CHECK(a.next_comment_time == 0.0);
  CHECK(time_features(t, 1).prev_comment_time == 0.0);
}

TEST_CASE("time features are monotone in the gap") {
  AnswerThread t = tiny_thread();
  double previous = -1.0;
  for (int minutes : {0, 1, 2, 10, 60, 1440, 100000}) {
    const Timestamp ts = t.answer.creation_ts + std::chrono::minutes(minutes);
    RawComment c = comment(1, 30, "2020-01-01T00:00:00", "x");
    c.creation_ts = ts;
    t.comments = {c};
    const double v = time_features(t, 0).prev_post_edit_time;
    CHECK(v >= previous);
    previous = v;
  }
}

TEST_CASE("post_change_similarity: hand-computed token sets") {
  const AnswerThread& t = json_thread();
  // Comment 60185364 has 17 tokens; the 17:25 edit adds 8 (see, the,
  // implementations, page, for, list, of, validators). Shared: the,
  // validators. 2 / (17 + 8 - 2).
  CHECK(post_change_similarity(t, 0) == doctest::Approx(2.0 / 23.0));
  // 60190443 vs the 2019 edit adding {must, know, draft}: nothing shared.
  CHECK(post_change_similarity(t, 1) == 0.0);
  // 99591573: {draft} shared with the 10 comment tokens -> 1 / 12.
  CHECK(post_change_similarity(t, 2) == doctest::Approx(1.0 / 12.0));
  // 99594548 contains must, know and draft among its 12 tokens.
  CHECK(post_change_similarity(t, 3) == doctest::Approx(3.0 / 12.0));
}

TEST_CASE("post_change_similarity: no later edit and exact echo") {
  AnswerThread t = tiny_thread();
  t.comments = {comment(1, 30, "2020-01-02T00:00:00", "mention thread safety")};
  CHECK(post_change_similarity(t, 0) == 0.0);
  t.edits.push_back({2, 20, parse_timestamp("2020-01-03T00:00:00"),
                     "<p>Use the parser.</p><p>Mention thread safety.</p>"});
  CHECK(post_change_similarity(t, 0) == 1.0);
}

TEST_CASE("sentiment") {
  CHECK(sentiment("").polarity == 0.0);
  CHECK(sentiment("").subjectivity == 0.0);
  CHECK(sentiment("zzz qqq").polarity == 0.0);
  const SentimentScore great = sentiment("great");
  CHECK(great.polarity == doctest::Approx(0.8));
  CHECK(great.subjectivity == doctest::Approx(0.75));
  CHECK(sentiment("not great").polarity == doctest::Approx(-0.8));
  CHECK(sentiment("not great").subjectivity == doctest::Approx(0.75));
  CHECK(sentiment("bad terrible awful").polarity < 0.0);
  // Mean over matched words only.
  const auto* bad = SentimentLexicon::bundled().find("bad");
  REQUIRE(bad != nullptr);
  CHECK(sentiment("great code, bad docs").polarity ==
        doctest::Approx((0.8 + bad->polarity) / 2.0));
}

TEST_CASE("sentiment stays in range for every lexicon word") {
  const auto lex = SentimentLexicon::bundled();
  CHECK(lex.size() > 1000);
  for (const char* w : {"good", "wrong", "awesome", "broken", "useless", "perfect"}) {
    const auto s = sentiment(std::string("not ") + w + " " + w);
    CHECK(s.polarity >= -1.0);
    CHECK(s.polarity <= 1.0);
    CHECK(s.subjectivity >= 0.0);
    CHECK(s.subjectivity <= 1.0);
  }
}

TEST_CASE("sentiment lexicon TSV parsing") {
  const auto lex = SentimentLexicon::from_tsv("# header\nnice\t0.6\t1.0\n\nugly\t-0.7\t0.9\n");
  CHECK(lex.size() == 2);
  CHECK(lex.score("nice and ugly").polarity == doctest::Approx(-0.05));
  CHECK_THROWS_AS(SentimentLexicon::from_tsv("nice\tx\t1\n"), Error);
}

TEST_CASE("text surface features") {
  const SurfaceFeatures john = text_surface_features("@John please explain your code.");
  CHECK(john.starts_with_at);
  CHECK_FALSE(john.contains_question_mark);

  const SurfaceFeatures thanks = text_surface_features("Thank you!");
  CHECK(thanks.contains_exclamation_mark);
  CHECK_FALSE(thanks.contains_question_mark);
  CHECK(thanks.text_len == 10);

  CHECK(text_surface_features("  @x hi").starts_with_at);
  CHECK_FALSE(text_surface_features("mail me at a@b.com").starts_with_at);
  CHECK(text_surface_features("Works, BUT slow").contains_but);
  CHECK_FALSE(text_surface_features("a button").contains_but);
  CHECK(text_surface_features("throws an Exception here").contains_exception);
  // Word-boundary match: class names that end in "Exception" do not count.
  CHECK_FALSE(text_surface_features("NullPointerException").contains_exception);
  CHECK(text_surface_features("see http://example.com").contains_url);
  CHECK(text_surface_features("see WWW.example.com").contains_url);
  CHECK_FALSE(text_surface_features("see example.com").contains_url);
  CHECK(text_surface_features("thanks :)").contains_emotions);
  CHECK(text_surface_features("thanks :-D.").contains_emotions);
  CHECK_FALSE(text_surface_features("f(x:)").contains_emotions);
  CHECK(text_surface_features("caf\xC3\xA9").text_len == 4);
  CHECK(text_surface_features("").text_len == 0);
}

TEST_CASE("extract_mention") {
  CHECK(extract_mention("@ubiquibacon: Of course") == "ubiquibacon");
  CHECK(extract_mention("thanks @Steven.") == "steven");
  CHECK(extract_mention("mail a@b.com") == "");
  CHECK(extract_mention("no mention") == "");
  CHECK(extract_mention("@ alone") == "");
}

TEST_CASE("talks_to_role on the fixture") {
  const AnswerThread& t = json_thread();
  // "@ubiquibacon: ..." replies to an earlier commenter.
  CHECK(surface_features(t, 3).talks_to_role == TalksTo::kCommenter);
  CHECK(surface_features(t, 3).starts_with_at);
  CHECK(surface_features(t, 0).talks_to_role == TalksTo::kNobody);

  // "@StevenAkaTaz" matches the display name "Steven Aka Taz".
  const AnswerThread& q = queue_thread();
  const SurfaceFeatures s = surface_features(q, test::index_of(q, 76939452));
  CHECK(s.talks_to_role == TalksTo::kCommenter);
  CHECK(s.contains_url);
}

TEST_CASE("talks_to_role priority and matching rules") {
  AnswerThread t = tiny_thread();
  t.comments = {comment(1, 30, "2020-01-02T00:00:00", "first"),
                comment(2, 30, "2020-01-02T01:00:00", "@AnnAsker what version?"),
                comment(3, 30, "2020-01-02T02:00:00", "@bob fix this"),
                comment(4, 20, "2020-01-02T03:00:00", "@carol done"),
                comment(5, 20, "2020-01-02T04:00:00", "@nobody here"),
                comment(6, 20, "2020-01-02T05:00:00", "@ca too short")};
  CHECK(surface_features(t, 1).talks_to_role == TalksTo::kAsker);
  CHECK(surface_features(t, 2).talks_to_role == TalksTo::kAnswerer);
  CHECK(surface_features(t, 3).talks_to_role == TalksTo::kCommenter);  // prefix of "carolthird"
  CHECK(surface_features(t, 4).talks_to_role == TalksTo::kNobody);
  CHECK(surface_features(t, 5).talks_to_role == TalksTo::kNobody);

  // Only earlier commenters count.
  t.comments = {comment(1, 20, "2020-01-02T00:00:00", "@carol are you there?"),
                comment(2, 30, "2020-01-02T01:00:00", "yes")};
  CHECK(surface_features(t, 0).talks_to_role == TalksTo::kNobody);

  // A mention matching both asker and answerer goes to the asker.
  t.users[20].display_name = "Ann Answerer";
  t.comments = {comment(1, 30, "2020-01-02T00:00:00", "@ann hello")};
  CHECK(surface_features(t, 0).talks_to_role == TalksTo::kAsker);
}

TEST_CASE("featurize_thread: rows, order, counts") {
  const FeatureMatrix m = featurize_thread(json_thread(), FeatureMode::kFull, nullptr);
  REQUIRE(m.rows.size() == 4);
  CHECK_FALSE(m.embeddings_present);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(m.rows[i].features.comment_order == static_cast<std::int64_t>(i + 1));
    CHECK(m.rows[i].features.post_comment_count == 4);
    CHECK(m.rows[i].features.post_score == 12);
    CHECK(m.rows[i].features.prev_comment_embed_sim == 0.0);
  }
  CHECK(m.rows[0].comment_id == 60185364);
  CHECK(m.rows[0].features.comment_score == 2);
  CHECK(m.rows[0].features.prev_comment_jaccard_sim == 0.0);  // no previous comment
  CHECK(m.rows[3].features.next_comment_jaccard_sim == 0.0);  // no next comment
  CHECK(m.rows[3].features.prev_comment_jaccard_sim == doctest::Approx(3.0 / 19.0));
}

TEST_CASE("feature registry: full and deploy columns") {
  const auto& full = feature_names(FeatureMode::kFull);
  const auto& deploy = feature_names(FeatureMode::kDeploy);
  CHECK(full.size() == 29);
  CHECK(deploy.size() == 23);
  CHECK(full.front() == "comment_score");
  CHECK(full.back() == "talks_to_role");
  for (const auto& dropped : deploy_dropped_columns()) {
    CHECK(std::find(deploy.begin(), deploy.end(), dropped) == deploy.end());
    CHECK(std::find(full.begin(), full.end(), dropped) != full.end());
  }
  CHECK(deploy_dropped_columns().size() == 6);
}

TEST_CASE("deploy values equal the shared full columns bit for bit") {
  const auto& full_names = feature_names(FeatureMode::kFull);
  const auto& deploy_names = feature_names(FeatureMode::kDeploy);
  for (const AnswerThread& t : threads()) {
    for (std::size_t i = 0; i < t.comments.size(); ++i) {
      const FeatureVector fv = featurize_comment(t, i, nullptr);
      const auto full = feature_values(fv, FeatureMode::kFull);
      const auto deploy = feature_values(fv, FeatureMode::kDeploy);
      REQUIRE(full.size() == full_names.size());
      REQUIRE(deploy.size() == deploy_names.size());
      std::size_t d = 0;
      for (std::size_t c = 0; c < full.size(); ++c) {
        if (full_names[c] != deploy_names[d]) continue;
        CHECK(std::memcmp(&full[c], &deploy[d], sizeof(double)) == 0);
        if (++d == deploy.size()) break;
      }
      CHECK(d == deploy.size());
    }
  }
}

TEST_CASE("feature invariants on every fixture comment") {
  for (const AnswerThread& t : threads()) {
    for (std::size_t i = 0; i < t.comments.size(); ++i) {
      const FeatureVector fv = featurize_comment(t, i, nullptr);
      const RoleFlags& r = fv.role;
      const int set = r.by_asker + r.by_answerer + r.by_not_seen_commenter + r.by_seen_commenter;
      CHECK((set == 1 || (set == 2 && r.by_asker && r.by_answerer)));
      CHECK(fv.comment_order >= 1);
      CHECK(fv.comment_order <= fv.post_comment_count);
      for (double v : {fv.prev_comment_jaccard_sim, fv.next_comment_jaccard_sim,
                       fv.comment_post_change_sim, fv.subjectivity}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      CHECK(std::abs(fv.polarity) <= 1.0);
      for (double v : {fv.time.prev_post_edit_time, fv.time.next_post_edit_time,
                       fv.time.prev_comment_time, fv.time.next_comment_time}) {
        CHECK(v >= 0.0);
        CHECK(v <= kSentinel);
      }
      // Pure function: a second call agrees exactly.
      CHECK(feature_values(featurize_comment(t, i, nullptr), FeatureMode::kFull) ==
            feature_values(fv, FeatureMode::kFull));
    }
  }
}

TEST_CASE("reader thread: exclamation, order and scores") {
  const FeatureVector fv = features_of(reader_thread(), 700);
  CHECK(fv.surface.contains_exclamation_mark);
  CHECK(fv.role.by_not_seen_commenter);
  CHECK(fv.user_reputation == 1);
  CHECK(fv.comment_score == 3);
  CHECK(fv.time.next_post_edit_time == doctest::Approx(std::log(3.0)));
}

TEST_CASE("embedding similarities") {
  EmbeddingStore store;
  store.add(60185364, {1.0, 0.0});
  store.add(60190443, {1.0, 1.0});
  store.add(99591573, {0.0, 0.0});
  const AnswerThread& t = json_thread();
  const FeatureVector a = featurize_comment(t, 0, &store);
  CHECK(a.next_comment_embed_sim == doctest::Approx(std::sqrt(0.5)));
  CHECK(a.prev_comment_embed_sim == 0.0);
  const FeatureVector b = featurize_comment(t, 1, &store);
  CHECK(b.prev_comment_embed_sim == doctest::Approx(std::sqrt(0.5)));
  CHECK(b.next_comment_embed_sim == 0.0);  // zero vector
  const FeatureVector d = featurize_comment(t, 3, &store);
  CHECK(d.prev_comment_embed_sim == 0.0);  // own vector missing

  const FeatureMatrix m = featurize_thread(t, FeatureMode::kFull, &store);
  CHECK(m.embeddings_present);
  CHECK(m.missing_embeddings == 1);
}

TEST_CASE("embedding store loading") {
  std::istringstream ok("{\"comment_id\": 1, \"vector\": [0.5, 0.5]}\n\n"
                        "{\"comment_id\": 2, \"vector\": [1, 0]}\n");
  const EmbeddingStore s = EmbeddingStore::load(ok);
  CHECK(s.size() == 2);
  CHECK(s.dimension() == 2);
  REQUIRE(s.find(2) != nullptr);
  CHECK((*s.find(2))[0] == 1.0);
  CHECK(s.find(3) == nullptr);

  std::istringstream mixed("{\"comment_id\": 1, \"vector\": [0.5, 0.5]}\n"
                           "{\"comment_id\": 2, \"vector\": [1, 0, 0]}\n");
  CHECK_THROWS_WITH_AS(EmbeddingStore::load(mixed), doctest::Contains("line 2"), ValidationError);
  std::istringstream broken("{\"comment_id\": 1}\n");
  CHECK_THROWS_AS(EmbeddingStore::load(broken), ValidationError);
}

TEST_CASE("featurize_threads: parallel output equals sequential") {
  const auto seq = featurize_threads(threads(), FeatureMode::kFull, nullptr, 1);
  const auto par = featurize_threads(threads(), FeatureMode::kFull, nullptr, 8);
  REQUIRE(seq.rows.size() == 10);
  REQUIRE(par.rows.size() == seq.rows.size());
  const auto a = seq.to_labeled();
  const auto b = par.to_labeled();
  CHECK(a.ids == b.ids);
  CHECK(a.values == b.values);
  CHECK(featurize_threads(threads(), FeatureMode::kDeploy, nullptr).to_labeled().columns.size() ==
        23);
}

TEST_CASE("feature mode parsing") {
  CHECK(parse_feature_mode("deploy") == FeatureMode::kDeploy);
  CHECK(to_string(FeatureMode::kFull) == "full");
  CHECK_THROWS_AS(parse_feature_mode("partial"), ArgumentError);
}
