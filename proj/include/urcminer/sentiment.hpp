#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>

namespace urcminer {

struct SentimentScore {
  double polarity = 0.0;      // [-1, 1]
  double subjectivity = 0.0;  // [0, 1]
};

// Word-level polarity/subjectivity lexicon. A text scores the mean over its
// lexicon tokens; a token directly preceded by a negator has its polarity
// flipped.
class SentimentLexicon {
 public:
  // The lexicon compiled in from data/sentiment_lexicon.tsv.
  static const SentimentLexicon& bundled();
  static SentimentLexicon from_tsv(std::string_view text);
  static SentimentLexicon load(const std::filesystem::path& path);

  SentimentScore score(std::string_view text) const;
  const SentimentScore* find(const std::string& word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, SentimentScore> entries_;
};

inline SentimentScore sentiment(std::string_view text) {
  return SentimentLexicon::bundled().score(text);
}

}  // namespace urcminer
