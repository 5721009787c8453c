#pragma once

#include <string>
#include <vector>

namespace supmmd {

// clipped n-gram recall of the candidate against each reference, averaged;
// the candidate is cut to its first truncate_words tokens beforehand
double rouge_n_recall(const std::vector<std::string>& candidate,
                      const std::vector<std::vector<std::string>>& references, int n,
                      int truncate_words, bool warn_short = true);

// harmonic mean of unigram and bigram recall (0 if either is 0); r2_only swaps in plain bigram recall
double alpha_score(const std::vector<std::string>& candidate,
                   const std::vector<std::vector<std::string>>& references, int truncate_words,
                   bool r2_only = false, bool warn_short = true);

}  // namespace supmmd
