#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "urcminer/matrix.hpp"

namespace urcminer {

struct Vocabulary {
  std::vector<std::string> terms;            // lexicographic
  std::vector<std::size_t> document_frequency;  // aligned with terms
  std::size_t n_documents = 0;

  std::size_t size() const { return terms.size(); }
  // ln((1 + N) / (1 + df)) + 1
  double idf(std::size_t term) const;

  bool operator==(const Vocabulary&) const = default;
};

// Drops stop-words and every term whose total occurrence count in the corpus
// is below `min_count`.
Vocabulary fit_vocabulary(std::span<const std::string> texts,
                          const std::set<std::string>& stopwords,
                          std::size_t min_count = 3);

// Raw term counts times idf, each row scaled to unit L2 norm (all-zero rows
// stay zero). Out-of-vocabulary tokens are ignored.
Matrix transform(std::span<const std::string> texts, const Vocabulary& vocabulary);

// Column names for a TF-IDF block: "tfidf:<term>".
std::vector<std::string> tfidf_column_names(const Vocabulary& vocabulary);

std::string vocabulary_to_json(const Vocabulary& vocabulary);
Vocabulary vocabulary_from_json(std::string_view text);
void save_vocabulary(const Vocabulary& vocabulary, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace urcminer
