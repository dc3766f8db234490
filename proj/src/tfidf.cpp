#include "urcminer/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <unordered_map>

#include <json.hpp>

#include "urcminer/common.hpp"
#include "urcminer/text.hpp"

namespace urcminer {

double Vocabulary::idf(std::size_t term) const {
  return std::log((1.0 + static_cast<double>(n_documents)) /
                  (1.0 + static_cast<double>(document_frequency[term]))) +
         1.0;
}

Vocabulary fit_vocabulary(std::span<const std::string> texts,
                          const std::set<std::string>& stopwords,
                          std::size_t min_count) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> stats;  // count, df
  for (const std::string& text : texts) {
    const auto tokens = tokenize(text);
    std::set<std::string_view> seen;
    for (const std::string& tok : tokens) {
      if (stopwords.contains(tok)) continue;
      auto& [count, df] = stats[tok];
      ++count;
      if (seen.insert(tok).second) ++df;
    }
  }
  Vocabulary vocab;
  vocab.n_documents = texts.size();
  for (const auto& [term, s] : stats) {
    if (s.first < min_count) continue;
    vocab.terms.push_back(term);
    vocab.document_frequency.push_back(s.second);
  }
  return vocab;
}

Matrix transform(std::span<const std::string> texts, const Vocabulary& vocabulary) {
  std::unordered_map<std::string_view, std::size_t> column;
  for (std::size_t i = 0; i < vocabulary.terms.size(); ++i) column.emplace(vocabulary.terms[i], i);
  std::vector<double> idf(vocabulary.size());
  for (std::size_t i = 0; i < idf.size(); ++i) idf[i] = vocabulary.idf(i);

  Matrix out(texts.size(), vocabulary.size());
  for (std::size_t r = 0; r < texts.size(); ++r) {
    auto row = out.row(r);
    for (const std::string& tok : tokenize(texts[r])) {
      if (auto it = column.find(tok); it != column.end()) row[it->second] += 1.0;
    }
    double norm = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] *= idf[c];
      norm += row[c] * row[c];
    }
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& v : row) v /= norm;
    }
  }
  return out;
}

std::vector<std::string> tfidf_column_names(const Vocabulary& vocabulary) {
  std::vector<std::string> names;
  names.reserve(vocabulary.size());
  for (const auto& t : vocabulary.terms) names.push_back("tfidf:" + t);
  return names;
}

std::string vocabulary_to_json(const Vocabulary& v) {
  nlohmann::json j;
  j["n_documents"] = v.n_documents;
  j["terms"] = v.terms;
  j["df"] = v.document_frequency;
  return j.dump();
}

Vocabulary vocabulary_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Vocabulary v;
    v.n_documents = j.at("n_documents").get<std::size_t>();
    v.terms = j.at("terms").get<std::vector<std::string>>();
    v.document_frequency = j.at("df").get<std::vector<std::size_t>>();
    if (v.terms.size() != v.document_frequency.size()) {
      throw ValidationError("vocabulary terms and df differ in length");
    }
    if (!std::is_sorted(v.terms.begin(), v.terms.end())) {
      throw ValidationError("vocabulary terms are not sorted");
    }
    for (std::size_t df : v.document_frequency) {
      if (df > v.n_documents) throw ValidationError("vocabulary df exceeds n_documents");
    }
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad vocabulary file: ") + e.what());
  }
}

void save_vocabulary(const Vocabulary& vocabulary, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << vocabulary_to_json(vocabulary) << '\n';
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return vocabulary_from_json(std::string(std::istreambuf_iterator<char>(in), {}));
}

}  // namespace urcminer
