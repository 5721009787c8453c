#include "supmmd/textfeat.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "supmmd/errors.hpp"
#include "supmmd/util.hpp"

using nlohmann::json;

namespace supmmd {

Channel parse_channel(char c) {
    switch (c) {
        case 'u': return Channel::unigram;
        case 'b': return Channel::bigram;
        case 'e': return Channel::entity;
    }
    throw UsageError(std::string("unknown channel '") + c + "', expected u, b or e");
}

char channel_code(Channel ch) {
    switch (ch) {
        case Channel::unigram: return 'u';
        case Channel::bigram: return 'b';
        case Channel::entity: return 'e';
    }
    return '?';
}

std::vector<std::string> channel_tokens(const SentenceRecord& rec, Channel ch) {
    switch (ch) {
        case Channel::unigram: return rec.tokens;
        case Channel::bigram: {
            std::vector<std::string> out = rec.tokens;
            for (std::size_t i = 0; i + 1 < rec.tokens.size(); ++i)
                out.push_back(rec.tokens[i] + "_" + rec.tokens[i + 1]);
            return out;
        }
        case Channel::entity: {
            std::vector<std::string> out;
            out.reserve(rec.entities.size());
            for (const auto& e : rec.entities) out.push_back(to_lower_ascii(e));
            return out;
        }
    }
    return {};
}

int ChannelVocab::add_or_get(const std::string& term) {
    auto it = index.find(term);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(terms.size());
    index.emplace(term, id);
    terms.push_back(term);
    return id;
}

int ChannelVocab::lookup(const std::string& term) const {
    auto it = index.find(term);
    return it == index.end() ? -1 : it->second;
}

double sparse_dot(const SparseVec& a, const SparseVec& b) {
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            acc += a[i].second * b[j].second;
            ++i;
            ++j;
        } else if (a[i].first < b[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    return acc;
}

double sparse_norm(const SparseVec& a) {
    double acc = 0.0;
    for (const auto& [idx, v] : a) acc += v * v;
    return std::sqrt(acc);
}

double sparse_cosine(const SparseVec& a, const SparseVec& b) {
    double na = sparse_norm(a), nb = sparse_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return sparse_dot(a, b) / (na * nb);
}

IsfMap build_isf(const std::vector<const SentenceRecord*>& pooled, Channel ch) {
    std::unordered_map<std::string, int> sf;
    for (const auto* rec : pooled) {
        std::unordered_set<std::string> distinct;
        for (auto& t : channel_tokens(*rec, ch)) distinct.insert(std::move(t));
        for (const auto& t : distinct) ++sf[t];
    }
    IsfMap isf;
    const double n = static_cast<double>(pooled.size());
    for (const auto& [term, count] : sf) isf[term] = std::log(n / static_cast<double>(count));
    return isf;
}

SparseVec tfisf_vector(const SentenceRecord& rec, Channel ch, const IsfMap& isf, ChannelVocab& vocab) {
    std::unordered_map<std::string, int> tf;
    for (auto& t : channel_tokens(rec, ch)) ++tf[t];
    SparseVec v;
    v.reserve(tf.size());
    for (const auto& [term, count] : tf) {
        auto it = isf.find(term);
        if (it == isf.end()) continue;  // unseen terms carry no frequency signal
        v.emplace_back(vocab.add_or_get(term), count * it->second);
    }
    std::sort(v.begin(), v.end());
    return v;
}

double tfisf_sum(const SentenceRecord& rec, Channel ch, const IsfMap& isf) {
    std::unordered_map<std::string, int> tf;
    for (auto& t : channel_tokens(rec, ch)) ++tf[t];
    double acc = 0.0;
    std::vector<std::pair<std::string, int>> ordered(tf.begin(), tf.end());
    std::sort(ordered.begin(), ordered.end());
    for (const auto& [term, count] : ordered) {
        auto it = isf.find(term);
        if (it != isf.end()) acc += count * it->second;
    }
    return acc;
}

std::vector<EntityAnnotation> load_annotations(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<EntityAnnotation> anns;
    long line_no = 0;
    for (const auto& line : lines) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw SchemaError("invalid JSON", line_no);
        EntityAnnotation a;
        if (!j.contains("topic_id") || !j["topic_id"].is_string()) throw SchemaError("topic_id must be a string", line_no);
        a.topic_id = j["topic_id"].get<std::string>();
        if (!j.contains("article_id") || !j["article_id"].is_string()) throw SchemaError("article_id must be a string", line_no);
        a.article_id = j["article_id"].get<std::string>();
        if (!j.contains("sentence_index") || !j["sentence_index"].is_number_integer())
            throw SchemaError("sentence_index must be an integer", line_no);
        a.sentence_index = j["sentence_index"].get<int>();
        if (!j.contains("entities") || !j["entities"].is_array()) throw SchemaError("entities must be an array", line_no);
        for (const auto& e : j["entities"]) {
            if (!e.is_string()) throw SchemaError("entity must be a string", line_no);
            a.entities.push_back(e.get<std::string>());
        }
        anns.push_back(std::move(a));
    }
    return anns;
}

void save_annotations(const std::vector<EntityAnnotation>& anns, const std::string& path) {
    std::ostringstream out;
    for (const auto& a : anns) {
        json j;
        j["version"] = "1.0";
        j["topic_id"] = a.topic_id;
        j["article_id"] = a.article_id;
        j["sentence_index"] = a.sentence_index;
        j["entities"] = a.entities;
        out << j.dump() << "\n";
    }
    write_file(path, out.str());
}

void attach_entities(std::vector<PreprocessedTopic>& topics, const std::vector<EntityAnnotation>& anns) {
    std::unordered_map<std::string, std::unordered_map<std::string, SentenceRecord*>> by_key;
    for (auto& t : topics) {
        auto& m = by_key[t.id];
        for (auto* list : {&t.sentences_a, &t.sentences_b})
            for (auto& rec : *list)
                m[rec.article_id + "#" + std::to_string(rec.index_in_article)] = &rec;
    }
    for (const auto& a : anns) {
        std::string where = a.topic_id + "/" + a.article_id + "#" + std::to_string(a.sentence_index);
        auto ti = by_key.find(a.topic_id);
        if (ti == by_key.end()) throw CoordinateError(where);
        auto si = ti->second.find(a.article_id + "#" + std::to_string(a.sentence_index));
        if (si == ti->second.end()) throw CoordinateError(where);
        si->second->entities = a.entities;
    }
}

}  // namespace supmmd
