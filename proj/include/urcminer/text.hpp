#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace urcminer {

// Lowercases ASCII, splits on every non-alphanumeric byte and drops tokens
// shorter than two characters. Non-ASCII bytes act as separators.
std::vector<std::string> tokenize(std::string_view text);
std::set<std::string> token_set(std::string_view text);

// Removes <...> tags and decodes entities, for HTML post bodies.
std::string strip_markup(std::string_view html);

// Number of UTF-8 code points.
std::size_t utf8_length(std::string_view text);

// |A∩B| / |A∪B|; two empty sets are identical (1.0).
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);
double jaccard(std::string_view text_a, std::string_view text_b);

// Cosine of two embeddings; 0.0 if either has zero norm. Throws
// ArgumentError on a dimension mismatch.
double cosine(std::span<const double> a, std::span<const double> b);

// The bundled stop-word list, or the file named by URCMINER_STOPWORDS.
std::set<std::string> default_stopwords();
std::set<std::string> load_stopwords(const std::filesystem::path& path);

}  // namespace urcminer
