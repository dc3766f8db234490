#pragma once

#include <string_view>

// Data files compiled into the library (see data/).
namespace urcminer::resources {

extern const std::string_view kStopwords;
extern const std::string_view kSentimentLexicon;

}  // namespace urcminer::resources
