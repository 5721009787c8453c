#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "supmmd/kernel.hpp"
#include "supmmd/textfeat.hpp"

namespace supmmd {

std::vector<std::string> feature_schema(bool update_mode);
std::vector<bool> indicator_mask(bool update_mode);

// stationary distribution of the damped walk over the similarity graph W (rows renormalized)
Vector lexrank_scores(const Matrix& W, double damping = 0.85, double tol = 1e-8, int max_iter = 10000);

struct SurfaceContext {
    const std::vector<const SentenceRecord*>* sentences = nullptr;  // document order
    const IsfMap* isf_unigram = nullptr;
    const Vector* lexrank = nullptr;  // aligned with sentences
    // distinct unigram terms of each article's first sentence within the same set
    const std::unordered_set<std::string>* first_sentence_terms = nullptr;
    const std::unordered_map<std::string, int>* article_sentence_counts = nullptr;
    const std::vector<std::string>* query_tokens = nullptr;
    const std::unordered_set<std::string>* stopwords = nullptr;
    const std::unordered_set<std::string>* noun_lexicon = nullptr;
    int btfisf_boost = 2;
    bool update_mode = false;
};

Matrix surface_features(const SurfaceContext& ctx);

int count_nouns(const SentenceRecord& rec, const std::unordered_set<std::string>& stopwords,
                const std::unordered_set<std::string>& noun_lexicon);

struct Standardizer {
    Vector mean, scale;
    std::vector<bool> indicator;

    // population statistics per non-indicator column; zero variance keeps scale 1 and warns
    static Standardizer fit(const Matrix& rows, const std::vector<bool>& indicator);
    Matrix apply(const Matrix& rows) const;
};

}  // namespace supmmd
