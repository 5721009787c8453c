#include "supmmd/rouge.hpp"

#include <algorithm>
#include <unordered_map>

#include "supmmd/errors.hpp"
#include "supmmd/util.hpp"

namespace supmmd {

namespace {

// n-gram multiset keyed by tokens joined on an unprintable separator
std::unordered_map<std::string, int> ngram_counts(const std::vector<std::string>& tokens, int n,
                                                  std::size_t limit) {
    std::unordered_map<std::string, int> counts;
    std::size_t len = std::min(tokens.size(), limit);
    if (static_cast<int>(len) < n) return counts;
    for (std::size_t i = 0; i + n <= len; ++i) {
        std::string key = tokens[i];
        for (int k = 1; k < n; ++k) {
            key += '\x1f';
            key += tokens[i + k];
        }
        ++counts[key];
    }
    return counts;
}

}  // namespace

double rouge_n_recall(const std::vector<std::string>& candidate,
                      const std::vector<std::vector<std::string>>& references, int n,
                      int truncate_words, bool warn_short) {
    if (n < 1) throw UsageError("n-gram order must be >= 1");
    if (truncate_words < 0) throw UsageError("truncation must be >= 0");
    bool any_ref_tokens = false;
    for (const auto& ref : references)
        if (!ref.empty()) any_ref_tokens = true;
    if (references.empty() || !any_ref_tokens) throw EmptyReferenceError("no reference tokens");

    auto cand = ngram_counts(candidate, n, static_cast<std::size_t>(truncate_words));
    double total = 0.0;
    for (const auto& ref : references) {
        if (static_cast<int>(ref.size()) < n) {
            if (warn_short)
                warn("reference shorter than the n-gram order, counting recall 0");
            continue;  // recall 0 for this reference
        }
        auto rc = ngram_counts(ref, n, ref.size());
        long denom = 0, clipped = 0;
        for (const auto& [g, c] : rc) {
            denom += c;
            auto it = cand.find(g);
            if (it != cand.end()) clipped += std::min(c, it->second);
        }
        if (denom > 0) total += static_cast<double>(clipped) / static_cast<double>(denom);
    }
    return total / static_cast<double>(references.size());
}

double alpha_score(const std::vector<std::string>& candidate,
                   const std::vector<std::vector<std::string>>& references, int truncate_words,
                   bool r2_only, bool warn_short) {
    double r2 = rouge_n_recall(candidate, references, 2, truncate_words, warn_short);
    if (r2_only) return r2;
    double r1 = rouge_n_recall(candidate, references, 1, truncate_words, warn_short);
    if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
    return 2.0 * r1 * r2 / (r1 + r2);
}

}  // namespace supmmd
