#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "tbkit/evaluator.hpp"

using namespace tbkit;
using fixtures::make_sentence;
using fixtures::tok;

TEST_SUITE("evaluator") {

TEST_CASE("a single wrong head costs one token on both metrics") {
    Treebank gold = fixtures::eval_gold_example();
    Treebank pred = fixtures::eval_pred_example();
    GroupedScores scores = score(gold, pred, Grouping::none);
    CHECK(scores.groups.empty());
    CHECK(scores.overall.tokens_total == 3);
    CHECK(scores.overall.head_correct == 2);
    CHECK(scores.overall.head_and_label_correct == 2);
    CHECK(scores.overall.uas() == doctest::Approx(2.0 / 3.0));
    CHECK(scores.overall.las() == doctest::Approx(2.0 / 3.0));
    CHECK(percent1(scores.overall.las()) == "66.7");
}

TEST_CASE("label mismatches hurt LAS but not UAS") {
    Treebank gold = fixtures::eval_gold_example();
    Treebank pred = gold;
    pred.sentences[0].tokens[2].deprel = "iobj";
    GroupedScores scores = score(gold, pred, Grouping::none);
    CHECK(scores.overall.uas() == doctest::Approx(1.0));
    CHECK(scores.overall.las() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("subtyped labels must match exactly for LAS") {
    Treebank gold = fixtures::eval_gold_example();
    gold.sentences[0].tokens[2].deprel = "obl:tmod";
    Treebank pred = gold;
    pred.sentences[0].tokens[2].deprel = "obl";
    GroupedScores scores = score(gold, pred, Grouping::none);
    CHECK(scores.overall.head_correct == 3);
    CHECK(scores.overall.head_and_label_correct == 2);
}

TEST_CASE("scoring a treebank against itself is perfect") {
    Treebank tb;
    std::mt19937 rng(11);
    for (int i = 1; i <= 20; ++i) tb.sentences.push_back(fixtures::random_valid_sentence(rng, i));
    GroupedScores scores = score(tb, tb);
    CHECK(scores.overall.uas() == doctest::Approx(1.0));
    CHECK(scores.overall.las() == doctest::Approx(1.0));
    CHECK(percent1(scores.overall.las()) == "100.0");
    REQUIRE(scores.groups.size() == 2);
    CHECK(scores.groups[0].first == "children");
    CHECK(scores.groups[1].first == "parents");
    CHECK(scores.groups[0].second.tokens_total + scores.groups[1].second.tokens_total ==
          scores.overall.tokens_total);
}

TEST_CASE("empty slices score as perfect rather than dividing by zero") {
    AttachmentScores empty;
    CHECK(empty.uas() == doctest::Approx(1.0));
    CHECK(empty.las() == doctest::Approx(1.0));
}

TEST_CASE("punctuation can be excluded from scoring") {
    Treebank gold;
    gold.sentences.push_back(make_sentence({{"sent_id", "1"}},
                                           {tok(1, "go", "go", "VERB", "VB", 0, "root"),
                                            tok(2, ".", ".", "PUNCT", ".", 1, "punct")}));
    Treebank pred = gold;
    pred.sentences[0].tokens[1].head = 0;
    pred.sentences[0].tokens[1].deprel = "root";

    GroupedScores with = score(gold, pred, Grouping::none, true);
    CHECK(with.overall.tokens_total == 2);
    CHECK(with.overall.head_correct == 1);

    GroupedScores without = score(gold, pred, Grouping::none, false);
    CHECK(without.overall.tokens_total == 1);
    CHECK(without.overall.head_correct == 1);
    CHECK(without.overall.las() == doctest::Approx(1.0));
}

TEST_CASE("speaker grouping splits on the child role") {
    Treebank gold = fixtures::eval_gold_example();  // Target_Child speaker
    Sentence parent = make_sentence({{"sent_id", "p1"}, {"speaker_role", "Mother"}},
                                    {tok(1, "hi", "hi", "INTJ", "UH", 0, "root")});
    gold.sentences.push_back(parent);
    GroupedScores scores = score(gold, gold);
    CHECK(scores.groups[0].second.tokens_total == 3);
    CHECK(scores.groups[1].second.tokens_total == 1);
}

TEST_CASE("alignment rejects mismatched inputs with precise messages") {
    Sentence g = make_sentence({{"sent_id", "1"}},
                               {tok(1, "a", "a", "DET", "DT", 2, "det"),
                                tok(2, "dog", "dog", "NOUN", "NN", 0, "root")});
    Sentence other_id = g;
    other_id.meta.set("sent_id", "2");
    CHECK_THROWS_AS(align(g, other_id), Error);

    Sentence short_pred = g;
    short_pred.tokens.pop_back();
    CHECK_THROWS_WITH_AS(align(g, short_pred),
                         "tokenization mismatch in sent 1: gold has 2 tokens, pred has 1", Error);

    Sentence reformed = g;
    reformed.tokens[1].form = "cat";
    CHECK_THROWS_WITH_AS(align(g, reformed),
                         "tokenization mismatch in sent 1 at token 2: 'dog' vs 'cat'", Error);
}

TEST_CASE("scoring demands identical sent_id sets") {
    Treebank gold = fixtures::eval_gold_example();
    Treebank pred;  // empty
    try {
        score(gold, pred);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()) == "sent_id sets differ: missing from pred: e1");
    }

    Treebank extra = gold;
    extra.sentences.push_back(make_sentence({{"sent_id", "zz"}},
                                            {tok(1, "hi", "hi", "INTJ", "UH", 0, "root")}));
    try {
        score(gold, extra);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()) == "sent_id sets differ: extra in pred: zz");
    }
}

TEST_CASE("long id listings are truncated") {
    Treebank gold, pred;
    for (int i = 0; i < 25; ++i) {
        Sentence s = make_sentence({{"sent_id", "m" + std::to_string(100 + i)}},
                                   {tok(1, "hi", "hi", "INTJ", "UH", 0, "root")});
        gold.sentences.push_back(s);
    }
    try {
        score(gold, pred);
        FAIL("expected an error");
    } catch (const Error& e) {
        std::string msg = e.what();
        CHECK(msg.find("+5 more") != std::string::npos);
    }
}

TEST_CASE("duplicate ids within one side are rejected") {
    Treebank gold = fixtures::eval_gold_example();
    gold.sentences.push_back(gold.sentences[0]);
    CHECK_THROWS_WITH_AS(score(gold, gold), "duplicate sent_id 'e1' in gold treebank", Error);
}

TEST_CASE("grouped scores agree with a brute-force recount") {
    std::mt19937 rng(977);
    for (int round = 0; round < 25; ++round) {
        Treebank gold, pred;
        const int sentences = 1 + static_cast<int>(rng() % 8);
        for (int i = 1; i <= sentences; ++i) {
            auto [g, p] = fixtures::random_scored_pair(rng, i);
            gold.sentences.push_back(std::move(g));
            pred.sentences.push_back(std::move(p));
        }
        GroupedScores fast = score(gold, pred);

        AttachmentScores slow_children, slow_parents;
        for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
            const Sentence& g = gold.sentences[i];
            const Sentence& p = pred.sentences[i];
            AttachmentScores& slot =
                g.meta.speaker_role() == "Target_Child" ? slow_children : slow_parents;
            for (std::size_t t = 0; t < g.tokens.size(); ++t) {
                ++slot.tokens_total;
                if (g.tokens[t].head == p.tokens[t].head) {
                    ++slot.head_correct;
                    if (g.tokens[t].deprel == p.tokens[t].deprel) ++slot.head_and_label_correct;
                }
            }
        }
        CHECK(fast.groups[0].second == slow_children);
        CHECK(fast.groups[1].second == slow_parents);
        CHECK(fast.overall.tokens_total == slow_children.tokens_total + slow_parents.tokens_total);
        CHECK(fast.overall.las() <= fast.overall.uas() + 1e-12);
    }
}

TEST_CASE("score tables render fixed one-decimal percentages") {
    Treebank gold = fixtures::eval_gold_example();
    Treebank pred = fixtures::eval_pred_example();
    GroupedScores scores = score(gold, pred);
    CHECK(scores_to_csv(scores) ==
          "metric,children,parents,overall\n"
          "LAS,66.7,-,66.7\n"
          "UAS,66.7,-,66.7\n");
    CHECK(scores_to_text(scores) ==
          "metric  children  parents  overall\n"
          "LAS         66.7        -     66.7\n"
          "UAS         66.7        -     66.7\n");

    GroupedScores flat = score(gold, pred, Grouping::none);
    CHECK(scores_to_csv(flat) ==
          "metric,overall\n"
          "LAS,66.7\n"
          "UAS,66.7\n");
}

}  // TEST_SUITE
