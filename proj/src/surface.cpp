#include "supmmd/surface.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>

#include "supmmd/errors.hpp"
#include "supmmd/util.hpp"

namespace supmmd {

std::vector<std::string> feature_schema(bool update_mode) {
    std::vector<std::string> s = {"pos_1",   "pos_2",     "pos_3",      "pos_later", "pos_rel",
                                  "n_words", "n_nouns",   "tfisf_sum",  "btfisf_sum", "lexrank"};
    if (update_mode) {
        s.push_back("par_start");
        s.push_back("qsim");
    }
    return s;
}

std::vector<bool> indicator_mask(bool update_mode) {
    std::vector<bool> m = {true, true, true, true, false, false, false, false, false, false};
    if (update_mode) {
        m.push_back(true);   // par_start
        m.push_back(false);  // qsim
    }
    return m;
}

Vector lexrank_scores(const Matrix& W, double damping, double tol, int max_iter) {
    const long n = W.rows();
    if (n == 0) throw EmptySetError("centrality of an empty graph");
    if (W.cols() != n) throw DimensionMismatchError("similarity graph must be square");

    Matrix P(n, n);
    for (long i = 0; i < n; ++i) {
        double row_sum = W.row(i).sum();
        if (row_sum <= 0.0) {
            P.row(i).setConstant(1.0 / static_cast<double>(n));
        } else {
            P.row(i) = W.row(i) / row_sum;
        }
    }

    Vector pi = Vector::Constant(n, 1.0 / static_cast<double>(n));
    const double jump = (1.0 - damping) / static_cast<double>(n);
    for (int it = 0; it < max_iter; ++it) {
        Vector next = damping * (P.transpose() * pi);
        next.array() += jump;
        double delta = (next - pi).lpNorm<1>();
        pi = next;
        if (delta < tol) return pi;
    }
    throw ConvergenceError("centrality walk exceeded the iteration cap");
}

int count_nouns(const SentenceRecord& rec, const std::unordered_set<std::string>& stopwords,
                const std::unordered_set<std::string>& noun_lexicon) {
    auto words = split_ws(rec.raw_text);
    int count = 0;
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::string stripped;
        for (char c : words[w])
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '\'') stripped.push_back(c);
        if (stripped.empty()) continue;
        std::string lower = to_lower_ascii(stripped);
        bool capitalized_mid = w > 0 && stripped[0] >= 'A' && stripped[0] <= 'Z';
        if (capitalized_mid || noun_lexicon.count(lower)) {
            ++count;
            continue;
        }
        if (stopwords.count(lower)) continue;
        static const char* suffixes[] = {"tion", "ment", "ness", "ity", "er", "ism"};
        for (const char* suf : suffixes) {
            std::size_t sl = std::strlen(suf);
            if (lower.size() > sl && lower.compare(lower.size() - sl, sl, suf) == 0) {
                ++count;
                break;
            }
        }
    }
    return count;
}

Matrix surface_features(const SurfaceContext& ctx) {
    if (!ctx.lexrank) throw MissingLexrankError("centrality scores must be computed first");
    if (!ctx.sentences || !ctx.isf_unigram || !ctx.first_sentence_terms ||
        !ctx.article_sentence_counts || !ctx.stopwords || !ctx.noun_lexicon)
        throw UsageError("surface context is incomplete");
    const auto& sents = *ctx.sentences;
    const long n = static_cast<long>(sents.size());
    if (ctx.lexrank->size() != n) throw DimensionMismatchError("centrality scores vs sentences");

    auto schema = feature_schema(ctx.update_mode);
    Matrix F = Matrix::Zero(n, static_cast<long>(schema.size()));

    std::vector<std::string> distinct_query;
    if (ctx.query_tokens) {
        distinct_query = *ctx.query_tokens;
        std::sort(distinct_query.begin(), distinct_query.end());
        distinct_query.erase(std::unique(distinct_query.begin(), distinct_query.end()), distinct_query.end());
    }

    for (long i = 0; i < n; ++i) {
        const SentenceRecord& rec = *sents[i];
        int idx = rec.index_in_article;
        F(i, 0) = idx == 0 ? 1.0 : 0.0;
        F(i, 1) = idx == 1 ? 1.0 : 0.0;
        F(i, 2) = idx == 2 ? 1.0 : 0.0;
        F(i, 3) = idx >= 3 ? 1.0 : 0.0;
        auto it = ctx.article_sentence_counts->find(rec.article_id);
        int count = it == ctx.article_sentence_counts->end() ? 1 : it->second;
        double rel = static_cast<double>(idx) / static_cast<double>(std::max(1, count - 1));
        F(i, 4) = std::clamp(rel, 0.0, 1.0);
        F(i, 5) = static_cast<double>(rec.word_count);
        F(i, 6) = static_cast<double>(count_nouns(rec, *ctx.stopwords, *ctx.noun_lexicon));
        F(i, 7) = tfisf_sum(rec, Channel::unigram, *ctx.isf_unigram);

        // same unigram mass, boosted for terms that open any article in this set
        {
            std::unordered_map<std::string, int> tf;
            for (auto& t : channel_tokens(rec, Channel::unigram)) ++tf[t];
            std::vector<std::pair<std::string, int>> ordered(tf.begin(), tf.end());
            std::sort(ordered.begin(), ordered.end());
            double acc = 0.0;
            for (const auto& [term, cnt] : ordered) {
                auto fit = ctx.isf_unigram->find(term);
                if (fit == ctx.isf_unigram->end()) continue;
                double boost = ctx.first_sentence_terms->count(term)
                                   ? static_cast<double>(ctx.btfisf_boost)
                                   : 1.0;
                acc += boost * cnt * fit->second;
            }
            F(i, 8) = acc;
        }
        F(i, 9) = (*ctx.lexrank)(i);

        if (ctx.update_mode) {
            F(i, 10) = rec.index_in_paragraph == 0 ? 1.0 : 0.0;
            double qs = 0.0;
            if (!distinct_query.empty()) {
                std::unordered_set<std::string> present(rec.tokens_all.begin(), rec.tokens_all.end());
                int hit = 0;
                for (const auto& qt : distinct_query)
                    if (present.count(qt)) ++hit;
                qs = static_cast<double>(hit) / static_cast<double>(distinct_query.size());
            }
            F(i, 11) = qs;
        }
    }
    return F;
}

Standardizer Standardizer::fit(const Matrix& rows, const std::vector<bool>& indicator) {
    const long d = rows.cols();
    if (static_cast<long>(indicator.size()) != d) throw DimensionMismatchError("indicator mask");
    if (rows.rows() == 0) throw EmptyInputError("standardizer fit without rows");
    Standardizer st;
    st.indicator = indicator;
    st.mean = Vector::Zero(d);
    st.scale = Vector::Ones(d);
    for (long j = 0; j < d; ++j) {
        if (indicator[static_cast<std::size_t>(j)]) continue;
        double mu = rows.col(j).mean();
        double var = (rows.col(j).array() - mu).square().mean();
        double sd = std::sqrt(var);
        st.mean(j) = mu;
        if (sd > 0.0) {
            st.scale(j) = sd;
        } else {
            warn("feature column " + std::to_string(j) + " has zero variance, leaving scale 1");
        }
    }
    return st;
}

Matrix Standardizer::apply(const Matrix& rows) const {
    if (rows.cols() != mean.size()) throw DimensionMismatchError("standardizer apply");
    Matrix out = rows;
    for (long j = 0; j < rows.cols(); ++j) {
        if (indicator[static_cast<std::size_t>(j)]) continue;
        out.col(j) = (rows.col(j).array() - mean(j)) / scale(j);
    }
    return out;
}

}  // namespace supmmd
