#include "urcminer/sentiment.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <sstream>

#include "urcminer/common.hpp"
#include "urcminer/resources.hpp"
#include "urcminer/text.hpp"

namespace urcminer {
namespace {

// "n't" contractions reach us split, e.g. "doesn't" -> "doesn" ("t" is
// dropped by the tokenizer).
constexpr std::array<std::string_view, 17> kNegators = {
    "not",   "no",    "never",  "don",    "doesn",  "didn",  "isn",   "wasn",  "aren",
    "weren", "won",   "wouldn", "couldn", "shouldn", "hasn", "haven", "cannot"};

bool is_negator(std::string_view tok) {
  return std::find(kNegators.begin(), kNegators.end(), tok) != kNegators.end();
}

}  // namespace

const SentimentLexicon& SentimentLexicon::bundled() {
  static const SentimentLexicon lexicon = from_tsv(resources::kSentimentLexicon);
  return lexicon;
}

SentimentLexicon SentimentLexicon::from_tsv(std::string_view text) {
  SentimentLexicon lex;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string word;
    SentimentScore s;
    if (!std::getline(fields, word, '\t') || !(fields >> s.polarity >> s.subjectivity)) {
      throw ParseError("malformed lexicon entry", lineno);
    }
    lex.entries_[word] = s;
  }
  return lex;
}

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return from_tsv(std::string(std::istreambuf_iterator<char>(in), {}));
}

const SentimentScore* SentimentLexicon::find(const std::string& word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

SentimentScore SentimentLexicon::score(std::string_view text) const {
  const auto tokens = tokenize(text);
  double polarity = 0.0;
  double subjectivity = 0.0;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const SentimentScore* s = find(tokens[i]);
    if (s == nullptr) continue;
    const bool negated = i > 0 && is_negator(tokens[i - 1]);
    polarity += negated ? -s->polarity : s->polarity;
    subjectivity += s->subjectivity;
    ++matched;
  }
  if (matched == 0) return {};
  const auto n = static_cast<double>(matched);
  return {std::clamp(polarity / n, -1.0, 1.0), std::clamp(subjectivity / n, 0.0, 1.0)};
}

}  // namespace urcminer
