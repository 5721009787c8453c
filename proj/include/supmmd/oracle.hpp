#pragma once

#include <string>
#include <vector>

#include "supmmd/corpus.hpp"

namespace supmmd {

struct OracleConfig {
    int budget = 104;
    double r = 0.4;
    bool r2_only = false;
};

struct OracleStep {
    int picked = -1;   // index into the candidate list
    double alpha = 0.0;
    int words = 0;
};

struct OracleResult {
    std::vector<int> picked;  // selection order
    double alpha = 0.0;
    int words = 0;
    std::vector<OracleStep> trace;
};

// greedy reference-matching extraction over candidates given in document order
OracleResult extract_oracle(const std::vector<const SentenceRecord*>& candidates,
                            const std::vector<std::vector<std::string>>& references,
                            const OracleConfig& cfg);

struct OracleRecord {
    std::string topic_id;
    std::string set;  // "A" | "B"
    std::vector<std::string> sentence_ids;  // "article_id#index_in_article"
    double alpha = 0.0;
    int words = 0;
};

std::vector<OracleRecord> load_oracles(const std::string& path);
void save_oracles(const std::vector<OracleRecord>& recs, const std::string& path);

}  // namespace supmmd
