#include "supmmd/dataset.hpp"

#include <algorithm>
#include <unordered_map>

#include "supmmd/errors.hpp"

namespace supmmd {

namespace {

std::vector<const SentenceRecord*> pooled_sentences(const PreprocessedTopic& topic) {
    std::vector<const SentenceRecord*> pooled;
    pooled.reserve(topic.sentences_a.size() + topic.sentences_b.size());
    for (const auto& s : topic.sentences_a) pooled.push_back(&s);
    for (const auto& s : topic.sentences_b) pooled.push_back(&s);
    return pooled;
}

std::vector<int> eligible_indices(const std::vector<SentenceRecord>& sents) {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(sents.size()); ++i)
        if (sents[static_cast<std::size_t>(i)].eligible) out.push_back(i);
    return out;
}

std::string sentence_key(const SentenceRecord& s) {
    return s.article_id + "#" + std::to_string(s.index_in_article);
}

struct SetView {
    std::vector<const SentenceRecord*> records;  // eligible, document order
    std::vector<std::string> ids;
    std::vector<int> lengths;
    std::unordered_set<std::string> first_sentence_terms;
    std::unordered_map<std::string, int> article_counts;  // over all sentences
};

SetView make_view(const std::vector<SentenceRecord>& sents, const std::vector<int>& elig) {
    SetView v;
    for (int i : elig) {
        const auto& s = sents[static_cast<std::size_t>(i)];
        v.records.push_back(&s);
        v.ids.push_back(sentence_key(s));
        v.lengths.push_back(s.word_count);
    }
    for (const auto& s : sents) {
        v.article_counts[s.article_id] += 1;
        if (s.index_in_article == 0)
            for (const auto& t : s.tokens) v.first_sentence_terms.insert(t);
    }
    return v;
}

std::vector<SparseVec> tfisf_rows(const std::vector<const SentenceRecord*>& records, Channel ch,
                                  const IsfMap& isf, ChannelVocab& vocab) {
    std::vector<SparseVec> rows;
    rows.reserve(records.size());
    for (const auto* r : records) rows.push_back(tfisf_vector(*r, ch, isf, vocab));
    return rows;
}

}  // namespace

TopicData build_topic_data(const PreprocessedTopic& topic, const DatasetConfig& cfg) {
    validate_kernel_spec(cfg.kernel);
    TopicData data;
    data.id = topic.id;
    data.topic = &topic;
    data.elig_a = eligible_indices(topic.sentences_a);
    data.elig_b = eligible_indices(topic.sentences_b);
    if (data.elig_a.empty()) throw NoEligibleSentenceError(topic.id + " set A");
    if (topic.has_set_b && data.elig_b.empty()) throw NoEligibleSentenceError(topic.id + " set B");

    SetView view_a = make_view(topic.sentences_a, data.elig_a);
    SetView view_b = make_view(topic.sentences_b, data.elig_b);
    data.ids_a = view_a.ids;
    data.ids_b = view_b.ids;
    data.len_a = view_a.lengths;
    data.len_b = view_b.lengths;

    auto pooled = pooled_sentences(topic);
    IsfMap isf_unigram = build_isf(pooled, Channel::unigram);
    IsfMap isf_bigram = build_isf(pooled, Channel::bigram);

    // cross-set cosines need one vocabulary per channel
    std::vector<Matrix> cos_aa, cos_bb, cos_ab;
    for (std::size_t c = 0; c < cfg.kernel.channels.size(); ++c) {
        Channel ch = cfg.kernel.channels[c];
        IsfMap local;
        const IsfMap* isf = &local;
        if (ch == Channel::unigram) isf = &isf_unigram;
        else if (ch == Channel::bigram) isf = &isf_bigram;
        else local = build_isf(pooled, ch);
        ChannelVocab vocab;
        auto rows_a = tfisf_rows(view_a.records, ch, *isf, vocab);
        auto rows_b = tfisf_rows(view_b.records, ch, *isf, vocab);
        cos_aa.push_back(cosine_gram(rows_a, rows_a, true));
        if (topic.has_set_b) {
            cos_bb.push_back(cosine_gram(rows_b, rows_b, true));
            cos_ab.push_back(cosine_gram(rows_a, rows_b, false));
        }
    }
    data.K_aa = combined_kernel(cos_aa, cfg.kernel);
    if (topic.has_set_b) {
        data.K_bb = combined_kernel(cos_bb, cfg.kernel);
        data.K_ab = combined_kernel(cos_ab, cfg.kernel);
    }

    auto surface_for = [&](const SetView& view) {
        ChannelVocab vocab;
        auto rows = tfisf_rows(view.records, Channel::bigram, isf_bigram, vocab);
        Vector lex = lexrank_scores(cosine_gram(rows, rows, true));
        SurfaceContext ctx;
        ctx.sentences = &view.records;
        ctx.isf_unigram = &isf_unigram;
        ctx.lexrank = &lex;
        ctx.first_sentence_terms = &view.first_sentence_terms;
        ctx.article_sentence_counts = &view.article_counts;
        ctx.query_tokens = &topic.query_tokens;
        ctx.stopwords = &cfg.stopwords;
        ctx.noun_lexicon = &cfg.noun_lexicon;
        ctx.btfisf_boost = cfg.btfisf_boost;
        ctx.update_mode = cfg.update_mode;
        return surface_features(ctx);
    };
    data.raw_feats_a = surface_for(view_a);
    if (topic.has_set_b) data.raw_feats_b = surface_for(view_b);
    return data;
}

void apply_standardizer(TopicData& data, const Standardizer& st) {
    data.feats_a = st.apply(data.raw_feats_a);
    if (data.raw_feats_b.rows() > 0) data.feats_b = st.apply(data.raw_feats_b);
}

std::vector<Matrix> build_centered_channel_grams(const PreprocessedTopic& topic, char set_code,
                                                 const std::vector<Channel>& channels) {
    const bool is_b = set_code == 'B' || set_code == 'b';
    const auto& sents = is_b ? topic.sentences_b : topic.sentences_a;
    auto elig = eligible_indices(sents);
    if (elig.empty()) throw NoEligibleSentenceError(topic.id + (is_b ? " set B" : " set A"));
    std::vector<const SentenceRecord*> records;
    for (int i : elig) records.push_back(&sents[static_cast<std::size_t>(i)]);

    auto pooled = pooled_sentences(topic);
    std::vector<Matrix> grams;
    for (Channel ch : channels) {
        IsfMap isf = build_isf(pooled, ch);
        ChannelVocab vocab;
        auto rows = tfisf_rows(records, ch, isf, vocab);
        grams.push_back(center_gram(cosine_gram(rows, rows, true)));
    }
    return grams;
}

namespace {

const std::vector<std::string>& ids_for_set(const TopicData& data, const std::string& set) {
    if (set == "A") return data.ids_a;
    if (set == "B") return data.ids_b;
    throw SchemaError("oracle set must be A or B, got " + set);
}

}  // namespace

std::vector<std::string> eligible_ids(const PreprocessedTopic& topic, char set_code) {
    const bool is_b = set_code == 'B' || set_code == 'b';
    const auto& sents = is_b ? topic.sentences_b : topic.sentences_a;
    std::vector<std::string> ids;
    for (const auto& s : sents)
        if (s.eligible) ids.push_back(sentence_key(s));
    return ids;
}

Vector mkl_labels(const std::vector<std::string>& candidate_ids, const OracleRecord& rec) {
    std::unordered_set<std::string> in_summary(rec.sentence_ids.begin(), rec.sentence_ids.end());
    Vector y(static_cast<long>(candidate_ids.size()));
    long positives = 0;
    for (std::size_t i = 0; i < candidate_ids.size(); ++i) {
        bool hit = in_summary.count(candidate_ids[i]) > 0;
        y(static_cast<long>(i)) = hit ? 1.0 : -1.0;
        if (hit) ++positives;
    }
    if (y.size() == 0 || positives == 0 || positives == y.size())
        throw LabelError(rec.topic_id + ": summary labels need both classes");
    return y;
}

std::vector<int> oracle_positions(const TopicData& data, const OracleRecord& rec) {
    const auto& ids = ids_for_set(data, rec.set);
    std::unordered_map<std::string, int> where;
    for (std::size_t i = 0; i < ids.size(); ++i) where[ids[i]] = static_cast<int>(i);
    std::vector<int> positions;
    positions.reserve(rec.sentence_ids.size());
    for (const auto& sid : rec.sentence_ids) {
        auto it = where.find(sid);
        if (it == where.end()) throw CoordinateError(rec.topic_id + "/" + sid);
        positions.push_back(it->second);
    }
    return positions;
}

namespace {

Matrix take_rows(const Matrix& M, const std::vector<int>& rows) {
    Matrix out(static_cast<long>(rows.size()), M.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<long>(i)) = M.row(rows[i]);
    return out;
}

Matrix take_cols(const Matrix& M, const std::vector<int>& cols) {
    Matrix out(M.rows(), static_cast<long>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<long>(j)) = M.col(cols[j]);
    return out;
}

Matrix take_square(const Matrix& M, const std::vector<int>& idx) {
    Matrix out(static_cast<long>(idx.size()), static_cast<long>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j)
            out(static_cast<long>(i), static_cast<long>(j)) = M(idx[i], idx[j]);
    return out;
}

}  // namespace

TrainTopic make_train_topic(const TopicData& data, const OracleRecord& rec, bool comparative) {
    if (rec.sentence_ids.empty()) throw NoOracleError(data.id + ": empty summary");
    std::vector<int> sel = oracle_positions(data, rec);

    TrainTopic t;
    t.id = data.id;
    if (!comparative) {
        if (data.feats_a.rows() == 0) throw EmptyInputError(data.id + ": features not standardized");
        t.main.K_vv = data.K_aa;
        t.main.K_vs = take_cols(data.K_aa, sel);
        t.main.K_ss = take_square(data.K_aa, sel);
        t.main.omega_v = data.feats_a;
        t.main.omega_s = take_rows(data.feats_a, sel);
        return t;
    }
    if (rec.set != "B") throw SchemaError(data.id + ": comparative training expects set B summaries");
    if (data.feats_b.rows() == 0 || data.feats_a.rows() == 0)
        throw EmptyInputError(data.id + ": features not standardized");
    t.main.K_vv = data.K_bb;
    t.main.K_vs = take_cols(data.K_bb, sel);
    t.main.K_ss = take_square(data.K_bb, sel);
    t.main.omega_v = data.feats_b;
    t.main.omega_s = take_rows(data.feats_b, sel);

    TopicLossContext c;
    c.K_vv = data.K_aa;
    c.K_vs = take_cols(data.K_ab, sel);  // earlier-set rows against summary columns
    c.K_ss = t.main.K_ss;
    c.omega_v = data.feats_a;
    c.omega_s = t.main.omega_s;
    t.contrast = std::move(c);
    return t;
}

}  // namespace supmmd
