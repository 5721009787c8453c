#include "supmmd/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "supmmd/errors.hpp"
#include "supmmd/stemmer.hpp"
#include "supmmd/util.hpp"

using nlohmann::json;

namespace supmmd {

namespace {

json parse_line(const std::string& line, long line_no) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw SchemaError("invalid JSON", line_no);
    return j;
}

std::string require_string(const json& j, const char* key, long line_no) {
    if (!j.contains(key) || !j[key].is_string()) throw SchemaError(std::string(key) + " must be a string", line_no);
    return j[key].get<std::string>();
}

Article parse_article(const json& j, long line_no) {
    Article a;
    a.id = require_string(j, "id", line_no);
    if (j.contains("timestamp") && !j["timestamp"].is_null()) {
        if (!j["timestamp"].is_string()) throw SchemaError("timestamp must be string or null", line_no);
        a.timestamp = j["timestamp"].get<std::string>();
    }
    if (!j.contains("paragraphs") || !j["paragraphs"].is_array() || j["paragraphs"].empty())
        throw SchemaError("article needs a nonempty paragraphs array", line_no);
    for (const auto& p : j["paragraphs"]) {
        if (!p.is_string()) throw SchemaError("paragraph must be a string", line_no);
        a.paragraphs.push_back(p.get<std::string>());
    }
    return a;
}

json article_to_json(const Article& a) {
    json j;
    j["id"] = a.id;
    j["timestamp"] = a.timestamp ? json(*a.timestamp) : json(nullptr);
    j["paragraphs"] = a.paragraphs;
    return j;
}

}  // namespace

std::vector<Topic> load_topics(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<Topic> topics;
    std::unordered_set<std::string> seen;
    long line_no = 0;
    for (const auto& line : lines) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = parse_line(line, line_no);
        Topic t;
        t.id = require_string(j, "id", line_no);
        if (t.id.empty()) throw SchemaError("id must be nonempty", line_no);
        if (!seen.insert(t.id).second) throw DuplicateIdError(t.id, line_no);
        if (j.contains("query") && !j["query"].is_null()) {
            if (!j["query"].is_string()) throw SchemaError("query must be string or null", line_no);
            t.query = j["query"].get<std::string>();
        }
        if (!j.contains("set_a") || !j["set_a"].is_array() || j["set_a"].empty())
            throw SchemaError("set_a must be a nonempty array", line_no);
        for (const auto& a : j["set_a"]) t.articles_a.push_back(parse_article(a, line_no));
        if (j.contains("set_b") && !j["set_b"].is_null()) {
            if (!j["set_b"].is_array()) throw SchemaError("set_b must be array or null", line_no);
            std::vector<Article> b;
            for (const auto& a : j["set_b"]) b.push_back(parse_article(a, line_no));
            t.articles_b = std::move(b);
        }
        if (!j.contains("references") || !j["references"].is_array())
            throw SchemaError("references must be an array", line_no);
        for (const auto& r : j["references"]) {
            if (!r.is_string()) throw SchemaError("reference must be a string", line_no);
            t.references.push_back({r.get<std::string>(), {}});
        }
        topics.push_back(std::move(t));
    }
    return topics;
}

void save_topics(const std::vector<Topic>& topics, const std::string& path) {
    std::ostringstream out;
    for (const auto& t : topics) {
        json j;
        j["version"] = "1.0";
        j["id"] = t.id;
        j["query"] = t.query ? json(*t.query) : json(nullptr);
        json sa = json::array();
        for (const auto& a : t.articles_a) sa.push_back(article_to_json(a));
        j["set_a"] = std::move(sa);
        if (t.articles_b) {
            json sb = json::array();
            for (const auto& a : *t.articles_b) sb.push_back(article_to_json(a));
            j["set_b"] = std::move(sb);
        } else {
            j["set_b"] = nullptr;
        }
        json refs = json::array();
        for (const auto& r : t.references) refs.push_back(r.text);
        j["references"] = std::move(refs);
        out << j.dump() << "\n";
    }
    write_file(path, out.str());
}

std::vector<std::pair<std::string, std::string>> PreprocessConfig::default_substitutions() {
    return {
        {"<[^>]*>", " "},
        {"&amp;", "&"},
        {"&quot;", "\""},
        {"&apos;", "'"},
        {"&lt;", " "},
        {"&gt;", " "},
        {"\xE2\x80\x98", "'"},
        {"\xE2\x80\x99", "'"},
        {"\xE2\x80\x9C", "\""},
        {"\xE2\x80\x9D", "\""},
        {"\xE2\x80\x93", " "},
        {"\xE2\x80\x94", " "},
        {"\xE2\x80\xA6", "..."},
        {"``|''", "\""},
        {"[ \\t\\r\\n]+", " "},
    };
}

Preprocessor::Preprocessor(PreprocessConfig config,
                           std::unordered_set<std::string> stopwords,
                           std::unordered_set<std::string> abbreviations)
    : config_(std::move(config)), stopwords_(std::move(stopwords)), abbreviations_(std::move(abbreviations)) {
    if (config_.substitutions.empty()) config_.substitutions = PreprocessConfig::default_substitutions();
}

std::string Preprocessor::clean(const std::string& raw) const {
    std::string s = raw;
    for (const auto& [pattern, replacement] : config_.substitutions) {
        std::regex re(pattern);
        s = std::regex_replace(s, re, replacement);
    }
    return trim(s);
}

namespace {

bool is_upper_alpha(char c) { return c >= 'A' && c <= 'Z'; }
bool is_open_punct(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }
bool is_close_punct(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

}  // namespace

std::vector<std::string> Preprocessor::split_sentences(const std::string& s) const {
    std::vector<std::string> out;
    auto flush = [&](std::size_t start, std::size_t end) {
        std::string sent = trim(s.substr(start, end - start));
        bool has_alnum = std::any_of(sent.begin(), sent.end(),
                                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
        if (!sent.empty() && has_alnum) out.push_back(sent);
    };
    std::size_t start = 0;
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
        char c = s[i];
        if (c != '.' && c != '!' && c != '?') continue;
        std::size_t j = i + 1;
        while (j < n && is_close_punct(s[j])) ++j;
        if (j >= n) continue;  // paragraph end handles the tail
        if (s[j] != ' ') continue;
        std::size_t k = j + 1;
        while (k < n && s[k] == ' ') ++k;
        if (k >= n) continue;
        if (!(is_upper_alpha(s[k]) || is_open_punct(s[k]))) continue;
        if (c == '.') {
            // token before the period: abbreviation or initial keeps the sentence going
            std::size_t b = i;
            while (b > start && s[b - 1] != ' ') --b;
            std::string tok = s.substr(b, i - b);
            while (!tok.empty() && is_open_punct(tok.front())) tok.erase(tok.begin());
            tok = to_lower_ascii(tok);
            while (!tok.empty() && tok.back() == '.') tok.pop_back();
            bool is_initial = tok.size() == 1 && tok[0] >= 'a' && tok[0] <= 'z';
            if (is_initial || abbreviations_.count(tok)) continue;
        }
        flush(start, j);
        start = k;
        i = k - 1;
    }
    flush(start, n);
    return out;
}

std::pair<std::vector<std::string>, std::vector<std::string>> Preprocessor::tokenize(
    const std::string& sentence) const {
    std::string mapped;
    mapped.reserve(sentence.size());
    for (unsigned char c : sentence) {
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'')
            mapped.push_back(static_cast<char>(c));
        else
            mapped.push_back(' ');
    }
    std::vector<std::string> tokens, tokens_all;
    for (auto& raw : split_ws(mapped)) {
        std::size_t a = 0, b = raw.size();
        while (a < b && raw[a] == '\'') ++a;
        while (b > a && raw[b - 1] == '\'') --b;
        if (a >= b) continue;
        std::string word = raw.substr(a, b - a);
        std::string stem = porter_stem(word);
        tokens_all.push_back(stem);
        if (!stopwords_.count(word)) tokens.push_back(stem);
    }
    return {std::move(tokens), std::move(tokens_all)};
}

PreprocessedTopic Preprocessor::preprocess(const Topic& topic) const {
    PreprocessedTopic out;
    out.id = topic.id;
    out.query = topic.query;
    if (topic.query) out.query_tokens = tokenize(clean(*topic.query)).first;

    auto run_set = [&](const std::vector<Article>& articles, std::vector<SentenceRecord>& dest) {
        for (const auto& article : articles) {
            int idx = 0;
            for (const auto& para : article.paragraphs) {
                auto sentences = split_sentences(clean(para));
                for (std::size_t k = 0; k < sentences.size(); ++k) {
                    SentenceRecord rec;
                    rec.topic_id = topic.id;
                    rec.article_id = article.id;
                    rec.index_in_article = idx++;
                    rec.index_in_paragraph = static_cast<int>(k);
                    rec.raw_text = sentences[k];
                    auto [toks, toks_all] = tokenize(rec.raw_text);
                    rec.tokens = std::move(toks);
                    rec.tokens_all = std::move(toks_all);
                    rec.word_count = static_cast<int>(split_ws(rec.raw_text).size());
                    rec.eligible = rec.word_count >= config_.min_words && rec.word_count <= config_.max_words;
                    dest.push_back(std::move(rec));
                }
            }
        }
    };

    run_set(topic.articles_a, out.sentences_a);
    if (topic.articles_b) {
        out.has_set_b = true;
        run_set(*topic.articles_b, out.sentences_b);
    }
    if (out.sentences_a.empty() || (out.has_set_b && out.sentences_b.empty()))
        throw EmptyTopicError(topic.id);

    for (const auto& ref : topic.references) {
        ReferenceSummary r;
        r.text = ref.text;
        r.tokens_all = tokenize(clean(ref.text)).second;
        out.references.push_back(std::move(r));
    }
    return out;
}

namespace {

json record_to_json(const SentenceRecord& r) {
    json j;
    j["article_id"] = r.article_id;
    j["index_in_article"] = r.index_in_article;
    j["index_in_paragraph"] = r.index_in_paragraph;
    j["raw_text"] = r.raw_text;
    j["tokens"] = r.tokens;
    j["tokens_all"] = r.tokens_all;
    j["word_count"] = r.word_count;
    j["eligible"] = r.eligible;
    return j;
}

SentenceRecord record_from_json(const json& j, const std::string& topic_id, long line_no) {
    SentenceRecord r;
    r.topic_id = topic_id;
    r.article_id = require_string(j, "article_id", line_no);
    r.index_in_article = j.at("index_in_article").get<int>();
    r.index_in_paragraph = j.at("index_in_paragraph").get<int>();
    r.raw_text = require_string(j, "raw_text", line_no);
    r.tokens = j.at("tokens").get<std::vector<std::string>>();
    r.tokens_all = j.at("tokens_all").get<std::vector<std::string>>();
    r.word_count = j.at("word_count").get<int>();
    r.eligible = j.at("eligible").get<bool>();
    return r;
}

void check_artifact_version(const json& j, long line_no) {
    if (!j.contains("version") || !j["version"].is_string()) throw SchemaError("missing version", line_no);
    auto v = j["version"].get<std::string>();
    auto dot = v.find('.');
    if (v.substr(0, dot) != "1") throw SchemaError("unsupported major version " + v, line_no);
}

}  // namespace

std::string preprocessed_to_jsonl(const std::vector<PreprocessedTopic>& topics) {
    std::ostringstream out;
    for (const auto& t : topics) {
        json j;
        j["version"] = "1.0";
        j["id"] = t.id;
        j["query"] = t.query ? json(*t.query) : json(nullptr);
        j["query_tokens"] = t.query_tokens;
        json refs = json::array();
        for (const auto& r : t.references) refs.push_back({{"text", r.text}, {"tokens_all", r.tokens_all}});
        j["references"] = std::move(refs);
        json sa = json::array();
        for (const auto& r : t.sentences_a) sa.push_back(record_to_json(r));
        j["sentences_a"] = std::move(sa);
        if (t.has_set_b) {
            json sb = json::array();
            for (const auto& r : t.sentences_b) sb.push_back(record_to_json(r));
            j["sentences_b"] = std::move(sb);
        } else {
            j["sentences_b"] = nullptr;
        }
        out << j.dump() << "\n";
    }
    return out.str();
}

std::vector<PreprocessedTopic> load_preprocessed(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<PreprocessedTopic> topics;
    std::unordered_set<std::string> seen;
    long line_no = 0;
    for (const auto& line : lines) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = parse_line(line, line_no);
        check_artifact_version(j, line_no);
        PreprocessedTopic t;
        t.id = require_string(j, "id", line_no);
        if (!seen.insert(t.id).second) throw DuplicateIdError(t.id, line_no);
        if (j.contains("query") && !j["query"].is_null()) t.query = j["query"].get<std::string>();
        t.query_tokens = j.at("query_tokens").get<std::vector<std::string>>();
        for (const auto& r : j.at("references")) {
            ReferenceSummary ref;
            ref.text = r.at("text").get<std::string>();
            ref.tokens_all = r.at("tokens_all").get<std::vector<std::string>>();
            t.references.push_back(std::move(ref));
        }
        for (const auto& r : j.at("sentences_a")) t.sentences_a.push_back(record_from_json(r, t.id, line_no));
        if (j.contains("sentences_b") && !j["sentences_b"].is_null()) {
            t.has_set_b = true;
            for (const auto& r : j["sentences_b"]) t.sentences_b.push_back(record_from_json(r, t.id, line_no));
        }
        topics.push_back(std::move(t));
    }
    return topics;
}

namespace {

const std::vector<std::string>& content_pool() {
    static const std::vector<std::string> pool = {
        "mountain", "village",  "river",    "valley",   "flood",    "storm",    "rescue",   "crew",
        "official", "report",   "region",   "road",     "bridge",   "town",     "city",     "mayor",
        "council",  "police",   "officer",  "fire",     "damage",   "weather",  "rain",     "snow",
        "wind",     "coast",    "shore",    "harbor",   "ship",     "crash",    "survivor", "hospital",
        "doctor",   "nurse",    "patient",  "injury",   "disease",  "outbreak", "vaccine",  "school",
        "teacher",  "student",  "election", "vote",     "candidate", "party",   "leader",   "minister",
        "president", "budget",  "economy",  "market",   "trade",    "company",  "worker",   "strike",
        "union",    "factory",  "farm",     "crop",     "harvest",  "drought",  "famine",   "aid",
        "relief",   "refugee",  "camp",     "border",   "soldier",  "army",     "conflict", "peace",
        "treaty",   "summit",   "meeting",  "agreement", "protest", "crowd",    "street",   "building",
        "collapse", "earthquake", "tremor", "landslide", "debris",  "power",    "outage",   "water",
        "supply",   "shortage", "fuel",     "price",    "inflation", "bank",    "loan",     "debt",
        "court",    "judge",    "trial",    "verdict",  "prison",   "crime",    "theft",    "evidence",
        "witness",  "reporter", "newspaper", "radio",   "station",  "broadcast", "signal",  "satellite",
        "rocket",   "launch",   "orbit",    "science",  "research", "laboratory", "experiment", "discovery",
        "museum",   "festival", "concert",  "artist",   "painting", "theater",  "stadium",  "match",
        "team",     "coach",    "player",   "season",   "championship", "victory", "defeat", "record",
        "audience", "airport",  "flight",   "passenger", "runway",  "delay",    "railway",  "train",
        "track",    "tunnel",   "subway",   "traffic",  "highway",  "accident", "driver",   "vehicle",
        "engine",   "repair",   "said",     "reported", "announced", "confirmed", "warned", "arrived",
        "struck",   "destroyed", "rescued", "evacuated", "rebuilt", "opened",   "closed",   "launched",
        "signed",   "approved", "rejected", "visited",  "promised", "gathered", "heavy",    "severe",
        "major",    "minor",    "local",    "national", "northern", "southern", "eastern",  "western",
        "recent",   "early",    "late",     "strong",   "weak",     "new",      "old",      "large",
    };
    return pool;
}

const std::vector<std::string>& function_pool() {
    static const std::vector<std::string> pool = {
        "the", "a", "of", "in", "on", "with", "and", "to", "for", "by", "from", "at", "near", "after", "during",
    };
    return pool;
}

struct SynthTopic {
    Topic topic;
    std::vector<int> planted;  // article-major sentence positions in the planted set
};

std::string synth_sentence(std::mt19937& rng, const std::vector<std::string>& subpool, const SyntheticSpec& spec) {
    int len = draw_int(rng, spec.words_min, spec.words_max);
    std::vector<std::string> words;
    words.reserve(len);
    words.push_back("The");
    for (int i = 1; i + 1 < len; ++i) {
        // 4/5 content, 1/5 function words
        if (rng() % 5u != 0u)
            words.push_back(subpool[rng() % subpool.size()]);
        else
            words.push_back(function_pool()[rng() % function_pool().size()]);
    }
    // last word always content: a sentence-final single-letter word ("a.") reads
    // as an initial to the splitter and would merge two generated sentences
    if (len > 1) words.push_back(subpool[rng() % subpool.size()]);
    std::string s = join(words, " ");
    s += ".";
    return s;
}

std::vector<std::string> pick_subpool(std::mt19937& rng, int size) {
    std::vector<int> order(content_pool().size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    shuffle_det(order, rng);
    std::vector<std::string> sub;
    sub.reserve(size);
    for (int i = 0; i < size && i < static_cast<int>(order.size()); ++i)
        sub.push_back(content_pool()[order[i]]);
    return sub;
}

std::vector<Article> synth_articles(std::mt19937& rng, const std::string& topic_id, const std::string& set_tag,
                                    const std::vector<std::string>& subpool, const SyntheticSpec& spec,
                                    std::vector<std::vector<std::string>>& sentences_out) {
    std::vector<Article> articles;
    for (int a = 0; a < spec.n_articles; ++a) {
        std::vector<std::string> sents;
        sents.reserve(spec.sentences_per_article);
        for (int k = 0; k < spec.sentences_per_article; ++k) sents.push_back(synth_sentence(rng, subpool, spec));
        Article art;
        art.id = topic_id + "-" + set_tag + std::to_string(a);
        int first_para = (spec.sentences_per_article + 1) / 2;
        std::vector<std::string> p1(sents.begin(), sents.begin() + first_para);
        std::vector<std::string> p2(sents.begin() + first_para, sents.end());
        art.paragraphs.push_back(join(p1, " "));
        if (!p2.empty()) art.paragraphs.push_back(join(p2, " "));
        sentences_out.push_back(sents);
        articles.push_back(std::move(art));
    }
    return articles;
}

std::vector<int> plant_positions(std::mt19937& rng, const SyntheticSpec& spec) {
    std::vector<int> planted;
    std::vector<int> free_first;  // article indices whose sentence 0 is unused
    for (int a = 0; a < spec.n_articles; ++a) free_first.push_back(a);
    std::unordered_set<int> used;
    const int total = spec.n_articles * spec.sentences_per_article;
    for (int k = 0; k < spec.n_planted; ++k) {
        bool take_first = !free_first.empty() && draw_bernoulli(rng, spec.first_sentence_bias);
        int pos = -1;
        if (take_first) {
            std::size_t pick = rng() % free_first.size();
            pos = free_first[pick] * spec.sentences_per_article;
            free_first.erase(free_first.begin() + static_cast<long>(pick));
        } else {
            for (int tries = 0; tries < 1000; ++tries) {
                int cand = static_cast<int>(rng() % static_cast<unsigned>(total));
                if (cand % spec.sentences_per_article == 0) continue;  // keep non-first unless biased
                if (used.count(cand)) continue;
                pos = cand;
                break;
            }
            if (pos < 0) continue;
        }
        used.insert(pos);
        planted.push_back(pos);
    }
    std::sort(planted.begin(), planted.end());
    return planted;
}

std::vector<SynthTopic> synth_core(unsigned seed, int n_topics, const SyntheticSpec& spec) {
    if (n_topics < 1) throw UsageError("n_topics must be >= 1");
    std::mt19937 rng(seed);
    std::vector<SynthTopic> out;
    for (int t = 0; t < n_topics; ++t) {
        SynthTopic st;
        char buf[16];
        std::snprintf(buf, sizeof buf, "t%03d", t);
        st.topic.id = "synth-" + std::string(buf);

        auto subpool_a = pick_subpool(rng, spec.topic_vocab);
        std::vector<std::vector<std::string>> sents_a, sents_b;
        st.topic.articles_a = synth_articles(rng, st.topic.id, "a", subpool_a, spec, sents_a);

        const std::vector<std::vector<std::string>>* planted_sents = &sents_a;
        if (spec.with_set_b) {
            // set B shares half its vocabulary with A
            std::vector<std::string> subpool_b(subpool_a.begin(), subpool_a.begin() + subpool_a.size() / 2);
            auto fresh = pick_subpool(rng, spec.topic_vocab - static_cast<int>(subpool_b.size()));
            subpool_b.insert(subpool_b.end(), fresh.begin(), fresh.end());
            st.topic.articles_b = synth_articles(rng, st.topic.id, "b", subpool_b, spec, sents_b);
            planted_sents = &sents_b;
            st.topic.query = join({subpool_b[0], subpool_b[1], subpool_b[2], subpool_b[3]}, " ");
        }

        st.planted = plant_positions(rng, spec);
        std::vector<std::string> plant_text;
        for (int pos : st.planted) {
            int a = pos / spec.sentences_per_article;
            int k = pos % spec.sentences_per_article;
            plant_text.push_back((*planted_sents)[a][k]);
        }
        for (int r = 0; r < spec.n_references; ++r) {
            std::vector<std::string> rotated;
            for (std::size_t i = 0; i < plant_text.size(); ++i)
                rotated.push_back(plant_text[(i + r) % plant_text.size()]);
            st.topic.references.push_back({join(rotated, " "), {}});
        }
        out.push_back(std::move(st));
    }
    return out;
}

}  // namespace

std::vector<Topic> generate_synthetic(unsigned seed, int n_topics, const SyntheticSpec& spec) {
    std::vector<Topic> topics;
    for (auto& st : synth_core(seed, n_topics, spec)) topics.push_back(std::move(st.topic));
    return topics;
}

std::vector<std::vector<int>> synthetic_planted_positions(unsigned seed, int n_topics, const SyntheticSpec& spec) {
    std::vector<std::vector<int>> out;
    for (auto& st : synth_core(seed, n_topics, spec)) out.push_back(std::move(st.planted));
    return out;
}

}  // namespace supmmd
