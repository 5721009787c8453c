#pragma once

#include <string>

namespace supmmd {

// Porter stemmer. Expects a lowercased token; non-letters pass through untouched
// by the vowel/consonant rules (treated as consonants).
std::string porter_stem(const std::string& word);

}  // namespace supmmd
