#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace supmmd {

struct Article {
    std::string id;
    std::optional<std::string> timestamp;
    std::vector<std::string> paragraphs;
};

struct ReferenceSummary {
    std::string text;
    std::vector<std::string> tokens_all;  // filled by preprocess
};

struct Topic {
    std::string id;
    std::optional<std::string> query;
    std::vector<Article> articles_a;
    std::optional<std::vector<Article>> articles_b;
    std::vector<ReferenceSummary> references;
};

struct SentenceRecord {
    std::string topic_id;
    std::string article_id;
    int index_in_article = 0;
    int index_in_paragraph = 0;
    std::string raw_text;
    std::vector<std::string> tokens;      // stemmed, stopwords removed
    std::vector<std::string> tokens_all;  // stemmed, stopwords kept
    std::vector<std::string> entities;    // attached from annotations
    int word_count = 0;                   // raw whitespace words
    bool eligible = false;
};

struct PreprocessConfig {
    int min_words = 8;
    int max_words = 55;
    // ordered regex substitutions applied to raw text before splitting
    std::vector<std::pair<std::string, std::string>> substitutions;
    static std::vector<std::pair<std::string, std::string>> default_substitutions();
};

struct PreprocessedTopic {
    std::string id;
    std::optional<std::string> query;
    std::vector<std::string> query_tokens;  // stemmed, stopwords removed
    std::vector<SentenceRecord> sentences_a;
    std::vector<SentenceRecord> sentences_b;
    bool has_set_b = false;
    std::vector<ReferenceSummary> references;
};

std::vector<Topic> load_topics(const std::string& path);
void save_topics(const std::vector<Topic>& topics, const std::string& path);

class Preprocessor {
  public:
    Preprocessor(PreprocessConfig config,
                 std::unordered_set<std::string> stopwords,
                 std::unordered_set<std::string> abbreviations);

    PreprocessedTopic preprocess(const Topic& topic) const;

    std::string clean(const std::string& raw) const;
    std::vector<std::string> split_sentences(const std::string& cleaned_paragraph) const;
    // (tokens without stopwords, all tokens), both stemmed
    std::pair<std::vector<std::string>, std::vector<std::string>> tokenize(const std::string& sentence) const;

    const PreprocessConfig& config() const { return config_; }
    const std::unordered_set<std::string>& stopwords() const { return stopwords_; }

  private:
    PreprocessConfig config_;
    std::unordered_set<std::string> stopwords_;
    std::unordered_set<std::string> abbreviations_;
};

std::string preprocessed_to_jsonl(const std::vector<PreprocessedTopic>& topics);
std::vector<PreprocessedTopic> load_preprocessed(const std::string& path);

struct SyntheticSpec {
    int n_articles = 4;
    int sentences_per_article = 8;
    int words_min = 8;
    int words_max = 18;
    int n_planted = 4;
    double first_sentence_bias = 0.85;
    int topic_vocab = 30;
    int n_references = 2;
    bool with_set_b = false;
};

std::vector<Topic> generate_synthetic(unsigned seed, int n_topics, const SyntheticSpec& spec);

// index positions (article-major order) of the reference-copied sentences in set A
// (set B when present); used by tests to measure oracle recovery
std::vector<std::vector<int>> synthetic_planted_positions(unsigned seed, int n_topics, const SyntheticSpec& spec);

}  // namespace supmmd
