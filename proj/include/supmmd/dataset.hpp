#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "supmmd/corpus.hpp"
#include "supmmd/kernel.hpp"
#include "supmmd/oracle.hpp"
#include "supmmd/surface.hpp"
#include "supmmd/trainer.hpp"

namespace supmmd {

struct DatasetConfig {
    KernelSpec kernel;
    bool update_mode = false;
    int btfisf_boost = 2;
    std::unordered_set<std::string> stopwords;
    std::unordered_set<std::string> noun_lexicon;
};

// numeric view of one topic: kernels and raw features over eligible sentences
struct TopicData {
    std::string id;
    const PreprocessedTopic* topic = nullptr;
    std::vector<int> elig_a, elig_b;          // indices into sentences_a / sentences_b
    std::vector<std::string> ids_a, ids_b;    // "article_id#index_in_article"
    std::vector<int> len_a, len_b;
    Matrix K_aa, K_bb, K_ab;
    Matrix raw_feats_a, raw_feats_b;
    Matrix feats_a, feats_b;  // standardized, filled by apply_standardizer
};

TopicData build_topic_data(const PreprocessedTopic& topic, const DatasetConfig& cfg);

void apply_standardizer(TopicData& data, const Standardizer& st);

// per-channel centered cosine grams over the eligible sentences of one set,
// the inputs to the kernel weight fit
std::vector<Matrix> build_centered_channel_grams(const PreprocessedTopic& topic, char set_code,
                                                 const std::vector<Channel>& channels);

// "article_id#index" keys of one set's eligible sentences, document order
std::vector<std::string> eligible_ids(const PreprocessedTopic& topic, char set_code);

// +1 for sentences in the oracle summary, -1 otherwise; LabelError when one class is missing
Vector mkl_labels(const std::vector<std::string>& candidate_ids, const OracleRecord& rec);

// oracle rows mapped to positions in the topic's eligible candidate list
std::vector<int> oracle_positions(const TopicData& data, const OracleRecord& rec);

// assembles the loss contexts for one training topic (oracle subset as S)
TrainTopic make_train_topic(const TopicData& data, const OracleRecord& rec, bool comparative);

}  // namespace supmmd
