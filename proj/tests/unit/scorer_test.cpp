#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "lmprobe/error.hpp"
#include "lmprobe/scorer.hpp"

using namespace lmprobe;

namespace {

const char* kFixture = R"({
  "capabilities": {"mask_anywhere": false, "mask_token": "<mask>", "vocab_size": 50, "model_name": "fx"},
  "fill": {"cheese is made from <mask> .": [
      {"token": "milk", "logprob": -0.1},
      {"token": "cream", "logprob": -1.5},
      {"token": "goats", "logprob": -0.9},
      {"token": "milk", "logprob": -3.0},
      {"token": "butter", "logprob": -0.9}]},
  "perplexity": {"cheese is made from thing .": 12.5}
})";

}  // namespace

TEST(Canonicalize, SortsDedupsTruncates) {
  std::vector<Prediction> p{{"b", -1}, {"a", -1}, {"c", -0.5}, {"a", -2}, {"d", -3}};
  canonicalize(p, 3);
  EXPECT_EQ(p, (std::vector<Prediction>{{"c", -0.5}, {"a", -1}, {"b", -1}}));
}

TEST(CheckFill, Contract) {
  EXPECT_NO_THROW(check_fill_request("a [MASK] b", "[MASK]", 1));
  EXPECT_THROW(check_fill_request("a b", "[MASK]", 1), ContractError);
  EXPECT_THROW(check_fill_request("[MASK] [MASK]", "[MASK]", 1), ContractError);
  EXPECT_THROW(check_fill_request("a [MASK]", "[MASK]", 0), ContractError);
}

TEST(FixtureScorer, Playback) {
  auto s = FixtureScorer::parse(kFixture);
  auto caps = s.capabilities();
  EXPECT_FALSE(caps.mask_anywhere);
  EXPECT_EQ(caps.mask_token, "<mask>");
  EXPECT_EQ(caps.vocab_size, 50);

  auto r = s.score_fill("cheese  is made from <mask> .", 10);
  EXPECT_EQ(r.top_tokens(10), (std::vector<std::string>{"milk", "butter", "goats", "cream"}));
  EXPECT_DOUBLE_EQ(r.entries.front().logprob, -0.1);
  EXPECT_EQ(s.score_fill("cheese is made from <mask> .", 1).entries.size(), 1u);
  EXPECT_DOUBLE_EQ(s.perplexity("cheese is made from thing ."), 12.5);
  EXPECT_EQ(s.identity(), FixtureScorer::parse(kFixture).identity());
}

TEST(FixtureScorer, MissingEntriesAreContractErrors) {
  auto s = FixtureScorer::parse(kFixture);
  EXPECT_THROW(s.score_fill("bread is made from <mask> .", 5), ContractError);
  EXPECT_THROW(s.perplexity("bread is good ."), ContractError);
  EXPECT_THROW(s.perplexity("   "), ContractError);
  EXPECT_THROW(s.score_fill("no mask here", 5), ContractError);
}

TEST(FixtureScorer, CandidateRestriction) {
  auto s = FixtureScorer::parse(kFixture);
  const std::string prompt = "cheese is made from <mask> .";
  std::vector<std::string> cands{"cream", "goats", "wool"};
  auto full = s.score_fill(prompt, 10);
  auto restricted = s.score_fill(prompt, 10, cands);
  std::set<std::string> allowed(cands.begin(), cands.end());
  for (const auto& p : restricted.entries) EXPECT_TRUE(allowed.count(p.token));
  // Order agrees with the unrestricted ranking.
  std::vector<std::string> expected;
  for (const auto& p : full.entries)
    if (allowed.count(p.token)) expected.push_back(p.token);
  EXPECT_EQ(restricted.top_tokens(10), expected);
}

TEST(FixtureScorer, Defaults) {
  auto s = FixtureScorer::parse(R"({"capabilities": {"mask_token": "[MASK]", "vocab_size": 3, "model_name": "d"},
    "default_perplexity": 9, "default_fill": [{"token": "x", "logprob": -1}]})");
  EXPECT_DOUBLE_EQ(s.perplexity("anything"), 9.0);
  EXPECT_EQ(s.score_fill("q [MASK]", 3).top_tokens(3), std::vector<std::string>{"x"});
}

TEST(FixtureScorer, MalformedFixture) {
  EXPECT_THROW(FixtureScorer::parse("{"), ParseError);
  EXPECT_THROW(FixtureScorer::load("/nonexistent/fixture.json"), IoError);
}

TEST(MakeScorer, Kinds) {
  ScorerSpec bad{"nope", "", 2, {}};
  EXPECT_THROW(make_scorer(bad), ConfigError);
  ScorerSpec ngram{"ngram", std::string(LMPROBE_TEST_DATA) + "/tiny_corpus.txt", 2, {}};
  auto s = make_scorer(ngram);
  EXPECT_EQ(s->capabilities().model_name, "ngram-bigram");
}
