#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "supmmd/corpus.hpp"

namespace supmmd {

enum class Channel { unigram, bigram, entity };

Channel parse_channel(char c);
char channel_code(Channel ch);

// term list a sentence exposes on a channel; bigram = unigrams plus adjacent pairs joined "_"
std::vector<std::string> channel_tokens(const SentenceRecord& rec, Channel ch);

struct ChannelVocab {
    std::unordered_map<std::string, int> index;
    std::vector<std::string> terms;

    int add_or_get(const std::string& term);
    int lookup(const std::string& term) const;  // -1 when absent
    int size() const { return static_cast<int>(terms.size()); }
};

// sorted by index, strictly increasing
using SparseVec = std::vector<std::pair<int, double>>;

double sparse_dot(const SparseVec& a, const SparseVec& b);
double sparse_norm(const SparseVec& a);
double sparse_cosine(const SparseVec& a, const SparseVec& b);

using IsfMap = std::unordered_map<std::string, double>;

// inverse sentence frequency over the pooled sentence list (every sentence, both sets)
IsfMap build_isf(const std::vector<const SentenceRecord*>& pooled, Channel ch);

SparseVec tfisf_vector(const SentenceRecord& rec, Channel ch, const IsfMap& isf, ChannelVocab& vocab);

// sum over distinct terms of tf * isf
double tfisf_sum(const SentenceRecord& rec, Channel ch, const IsfMap& isf);

struct EntityAnnotation {
    std::string topic_id;
    std::string article_id;
    int sentence_index = 0;
    std::vector<std::string> entities;
};

std::vector<EntityAnnotation> load_annotations(const std::string& path);
void save_annotations(const std::vector<EntityAnnotation>& anns, const std::string& path);

// writes entities onto matching records; unknown coordinates raise CoordinateError
void attach_entities(std::vector<PreprocessedTopic>& topics, const std::vector<EntityAnnotation>& anns);

}  // namespace supmmd
