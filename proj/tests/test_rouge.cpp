#include <doctest.h>

#include "supmmd/errors.hpp"
#include "supmmd/rouge.hpp"

using namespace supmmd;

namespace {
using Tokens = std::vector<std::string>;
using Refs = std::vector<std::vector<std::string>>;
}

TEST_SUITE("rouge") {

TEST_CASE("bigram recall on the pinned pair") {
    Tokens cand = {"a", "b", "c"};
    Refs refs = {{"a", "b", "d"}};
    CHECK(rouge_n_recall(cand, refs, 2, 100) == doctest::Approx(0.5));
    CHECK(rouge_n_recall(cand, refs, 1, 100) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("counts clip at the reference multiplicity") {
    Tokens cand = {"a", "a", "b"};
    Refs refs = {{"a", "b", "b"}};
    // a matches once, b once: 2 of 3 reference unigrams
    CHECK(rouge_n_recall(cand, refs, 1, 100) == doctest::Approx(2.0 / 3.0));

    Tokens rep = {"a", "a", "a"};
    Refs one = {{"a"}};
    CHECK(rouge_n_recall(rep, one, 1, 100) == doctest::Approx(1.0));
}

TEST_CASE("the candidate is truncated before counting, references are not") {
    Tokens cand = {"a", "b", "c"};
    Refs refs = {{"a", "b", "c"}};
    CHECK(rouge_n_recall(cand, refs, 1, 2) == doctest::Approx(2.0 / 3.0));
    CHECK(rouge_n_recall(cand, refs, 2, 2) == doctest::Approx(0.5));  // only "a b" survives
    CHECK(rouge_n_recall(cand, refs, 1, 0) == 0.0);
    CHECK(rouge_n_recall(cand, refs, 1, 3) == doctest::Approx(1.0));
}

TEST_CASE("recall averages over references, short ones counting zero") {
    Tokens cand = {"a"};
    Refs refs = {{"a"}, {"b"}};
    CHECK(rouge_n_recall(cand, refs, 1, 100) == doctest::Approx(0.5));

    Tokens cab = {"a", "b"};
    Refs mixed = {{"a", "b"}, {"x"}};  // second is shorter than a bigram
    CHECK(rouge_n_recall(cab, mixed, 2, 100, false) == doctest::Approx(0.5));
}

TEST_CASE("degenerate references are rejected") {
    Tokens cand = {"a"};
    CHECK_THROWS_AS(rouge_n_recall(cand, {}, 1, 100), EmptyReferenceError);
    CHECK_THROWS_AS(rouge_n_recall(cand, {{}, {}}, 1, 100), EmptyReferenceError);
    CHECK_THROWS_AS(rouge_n_recall(cand, {{"a"}}, 0, 100), UsageError);
    CHECK_THROWS_AS(rouge_n_recall(cand, {{"a"}}, 1, -1), UsageError);
}

TEST_CASE("alpha is the harmonic mean of unigram and bigram recall") {
    Tokens cand = {"a", "b", "c"};
    Refs refs = {{"a", "b", "d"}};
    double r1 = rouge_n_recall(cand, refs, 1, 100);
    double r2 = rouge_n_recall(cand, refs, 2, 100);
    CHECK(alpha_score(cand, refs, 100) == doctest::Approx(2.0 * r1 * r2 / (r1 + r2)));

    // harmonic mean of 0.5 and 0.25 is 1/3
    CHECK(2.0 * 0.5 * 0.25 / 0.75 == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("alpha collapses to zero when either order misses") {
    Tokens cand = {"a", "x", "b"};  // unigrams overlap, bigrams never
    Refs refs = {{"a", "b"}};
    CHECK(rouge_n_recall(cand, refs, 1, 100) > 0.0);
    CHECK(rouge_n_recall(cand, refs, 2, 100) == 0.0);
    CHECK(alpha_score(cand, refs, 100) == 0.0);
}

TEST_CASE("alpha can report plain bigram recall") {
    Tokens cand = {"b", "a"};
    Refs refs = {{"a", "b", "a"}};
    double r2 = rouge_n_recall(cand, refs, 2, 100);
    CHECK(r2 == doctest::Approx(0.5));
    CHECK(alpha_score(cand, refs, 100, true) == doctest::Approx(r2));
    CHECK(alpha_score(cand, refs, 100, false) != doctest::Approx(r2));
}

}
