#include <doctest.h>

#include <cmath>

#include "supmmd/errors.hpp"
#include "supmmd/textfeat.hpp"
#include "supmmd/util.hpp"
#include "support/helpers.hpp"

using namespace supmmd;

namespace {

SentenceRecord rec_with(std::vector<std::string> tokens, std::vector<std::string> entities = {}) {
    SentenceRecord r;
    r.tokens = std::move(tokens);
    r.tokens_all = r.tokens;
    r.entities = std::move(entities);
    return r;
}

}  // namespace

TEST_SUITE("textfeat") {

TEST_CASE("channel codes round trip and reject junk") {
    CHECK(parse_channel('u') == Channel::unigram);
    CHECK(parse_channel('b') == Channel::bigram);
    CHECK(parse_channel('e') == Channel::entity);
    CHECK(channel_code(Channel::bigram) == 'b');
    CHECK_THROWS_AS(parse_channel('x'), UsageError);
}

TEST_CASE("bigram channel keeps unigrams and appends adjacent pairs") {
    auto r = rec_with({"storm", "hit", "coast"});
    auto toks = channel_tokens(r, Channel::bigram);
    CHECK(toks == std::vector<std::string>{"storm", "hit", "coast", "storm_hit", "hit_coast"});

    auto single = rec_with({"storm"});
    CHECK(channel_tokens(single, Channel::bigram) == std::vector<std::string>{"storm"});

    auto e = rec_with({"ignored"}, {"Berlin", "NATO"});
    CHECK(channel_tokens(e, Channel::entity) == std::vector<std::string>{"berlin", "nato"});
}

TEST_CASE("sparse ops agree with dense arithmetic") {
    SparseVec a = {{0, 1.0}, {2, 2.0}, {5, -1.0}};
    SparseVec b = {{2, 3.0}, {4, 4.0}, {5, 2.0}};
    CHECK(sparse_dot(a, b) == doctest::Approx(4.0));
    CHECK(sparse_norm(a) == doctest::Approx(std::sqrt(6.0)));
    CHECK(sparse_cosine(a, a) == doctest::Approx(1.0));
    CHECK(sparse_cosine(a, {}) == 0.0);
    SparseVec c = {{1, 1.0}};
    CHECK(sparse_dot(a, c) == 0.0);
}

TEST_CASE("inverse sentence frequency uses distinct terms per sentence") {
    auto r1 = rec_with({"flood", "flood", "river"});
    auto r2 = rec_with({"flood", "bridge"});
    auto r3 = rec_with({"river", "bridge"});
    auto r4 = rec_with({"flood"});
    std::vector<const SentenceRecord*> pooled = {&r1, &r2, &r3, &r4};
    auto isf = build_isf(pooled, Channel::unigram);
    // flood in 3 of 4 sentences despite repeating inside r1
    CHECK(isf.at("flood") == doctest::Approx(std::log(4.0 / 3.0)));
    CHECK(isf.at("river") == doctest::Approx(std::log(2.0)));
    CHECK(isf.at("bridge") == doctest::Approx(std::log(2.0)));

    // a term in every sentence carries zero weight
    auto r5 = rec_with({"x"});
    auto r6 = rec_with({"x", "y"});
    std::vector<const SentenceRecord*> p2 = {&r5, &r6};
    auto isf2 = build_isf(p2, Channel::unigram);
    CHECK(isf2.at("x") == 0.0);
}

TEST_CASE("tfisf vector multiplies term frequency by isf and skips unknown terms") {
    auto r1 = rec_with({"flood", "flood", "river"});
    auto r2 = rec_with({"bridge"});
    std::vector<const SentenceRecord*> pooled = {&r1, &r2};
    auto isf = build_isf(pooled, Channel::unigram);

    ChannelVocab vocab;
    auto v1 = tfisf_vector(r1, Channel::unigram, isf, vocab);
    REQUIRE(v1.size() == 2);
    for (std::size_t i = 1; i < v1.size(); ++i) CHECK(v1[i - 1].first < v1[i].first);
    double lf = std::log(2.0);
    double expect_sum = 2 * lf + lf;
    CHECK(tfisf_sum(r1, Channel::unigram, isf) == doctest::Approx(expect_sum));

    auto novel = rec_with({"quake"});
    CHECK(tfisf_vector(novel, Channel::unigram, isf, vocab).empty());
    CHECK(tfisf_sum(novel, Channel::unigram, isf) == 0.0);

    CHECK(vocab.lookup("flood") >= 0);
    CHECK(vocab.lookup("quake") == -1);
    CHECK(vocab.add_or_get("flood") == vocab.lookup("flood"));
}

TEST_CASE("annotations round trip and attach onto matching sentences") {
    auto dir = testsup::fresh_dir("textfeat");
    std::vector<EntityAnnotation> anns = {{"t1", "a1", 0, {"Paris", "Seine"}},
                                          {"t1", "a1", 2, {"Paris"}}};
    auto path = dir + "/anns.jsonl";
    save_annotations(anns, path);
    auto back = load_annotations(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].topic_id == "t1");
    CHECK(back[0].entities == std::vector<std::string>{"Paris", "Seine"});
    CHECK(back[1].sentence_index == 2);

    PreprocessedTopic t;
    t.id = "t1";
    for (int i = 0; i < 3; ++i) {
        SentenceRecord r;
        r.topic_id = "t1";
        r.article_id = "a1";
        r.index_in_article = i;
        t.sentences_a.push_back(r);
    }
    std::vector<PreprocessedTopic> topics = {t};
    attach_entities(topics, back);
    CHECK(topics[0].sentences_a[0].entities == std::vector<std::string>{"Paris", "Seine"});
    CHECK(topics[0].sentences_a[1].entities.empty());
    CHECK(topics[0].sentences_a[2].entities == std::vector<std::string>{"Paris"});

    std::vector<EntityAnnotation> bad = {{"t1", "a9", 0, {"X"}}};
    CHECK_THROWS_AS(attach_entities(topics, bad), CoordinateError);
    std::vector<EntityAnnotation> bad2 = {{"zz", "a1", 0, {"X"}}};
    CHECK_THROWS_AS(attach_entities(topics, bad2), CoordinateError);
}

TEST_CASE("annotation loader validates fields with line numbers") {
    auto dir = testsup::fresh_dir("textfeat");
    auto path = dir + "/bad.jsonl";
    write_file(path, R"({"version":"1.0","topic_id":"t","article_id":"a","sentence_index":"zero","entities":[]})"
                     "\n");
    CHECK_THROWS_WITH_AS(load_annotations(path), doctest::Contains("sentence_index"), SchemaError);
    write_file(path, R"({"version":"1.0","topic_id":"t","article_id":"a","sentence_index":0,"entities":[3]})"
                     "\n");
    CHECK_THROWS_AS(load_annotations(path), SchemaError);
}

}
