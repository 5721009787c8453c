#pragma once

#include <string>
#include <vector>

#include "supmmd/corpus.hpp"
#include "supmmd/textfeat.hpp"

namespace supmmd {

struct AnnotateConfig {
    std::string endpoint;    // e.g. http://localhost:2222/rest/annotate
    double confidence = 0.5;
    int timeout_ms = 10000;
    int max_retries = 3;
};

// posts each sentence to a Spotlight-style service; sentences with no resolved
// resources yield no annotation
std::vector<EntityAnnotation> fetch_entities(const AnnotateConfig& cfg,
                                             const std::vector<PreprocessedTopic>& topics);

}  // namespace supmmd
