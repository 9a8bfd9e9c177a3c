#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "lmprobe/error.hpp"
#include "lmprobe/metrics.hpp"

using namespace lmprobe;

namespace {

RankedPredictions preds(std::vector<std::string> tokens) {
  RankedPredictions p;
  double lp = 0;
  for (auto& t : tokens) p.entries.push_back({std::move(t), lp -= 1});
  return p;
}

QueryResult result(Relation r, double hit) {
  QueryResult q;
  q.relation = r;
  q.hits[1] = hit;
  return q;
}

}  // namespace

TEST(HitsAtK, Examples) {
  std::vector<std::string> ab{"a", "b"};
  EXPECT_DOUBLE_EQ(hits_at_k(preds({"x", "a", "y"}), ab, 3), 0.5);
  EXPECT_DOUBLE_EQ(hits_at_k(preds({"b", "a", "y"}), ab, 2), 1.0);
  EXPECT_DOUBLE_EQ(hits_at_k(preds({"x", "a", "b"}), ab, 1), 0.0);
  std::vector<std::string> cased{"Musical  Drama"};
  EXPECT_DOUBLE_EQ(hits_at_k(preds({"musical drama"}), cased, 1), 1.0);
}

TEST(HitsAtK, Contract) {
  std::vector<std::string> none;
  EXPECT_THROW(hits_at_k(preds({"a"}), none, 1), ContractError);
  std::vector<std::string> a{"a"};
  EXPECT_THROW(hits_at_k(preds({"a"}), a, 0), ContractError);
}

TEST(OverlapAtK, Examples) {
  EXPECT_NEAR(overlap_at_k(preds({"p", "q", "r"}), preds({"q", "r", "s"}), 3), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(overlap_at_k(preds({"p", "q"}), preds({"p", "q"}), 10), 1.0);
  EXPECT_DOUBLE_EQ(overlap_at_k(preds({"p", "q"}), preds({"r", "s"}), 2), 0.0);
  EXPECT_THROW(overlap_at_k(preds({}), preds({"a"}), 1), ContractError);
}

TEST(MissAtK, Examples) {
  std::vector<std::string> op{"bad"};
  EXPECT_DOUBLE_EQ(miss_at_k(preds({"bad", "good"}), op, 1), 1.0);
  EXPECT_DOUBLE_EQ(miss_at_k(preds({"good"}), op, 1), 0.0);
  std::vector<std::string> op3{"o1", "o2", "o3"};
  EXPECT_NEAR(miss_at_k(preds({"w", "o1", "o2"}), op3, 3), 2.0 / 3.0, 1e-15);
}

TEST(HitWithinAnswerCount, Examples) {
  std::vector<std::string> two{"a", "b"}, one{"a"}, three{"a", "b", "c"};
  EXPECT_TRUE(hit_within_answer_count(preds({"x", "b", "y"}), two));
  EXPECT_FALSE(hit_within_answer_count(preds({"x", "a"}), one));
  EXPECT_FALSE(hit_within_answer_count(preds({"x", "y", "z", "a", "b", "c"}), three));
}

TEST(Summarize, MeanAndSem) {
  std::vector<double> v{1.0, 0.0, 1.0, 1.0};
  auto s = summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 0.75);
  EXPECT_NEAR(s.sem, std::sqrt(0.25 / 4.0), 1e-15);
  EXPECT_EQ(s.n, 4u);
  std::vector<double> one{0.3};
  EXPECT_DOUBLE_EQ(summarize(one).sem, 0.0);
  EXPECT_EQ(summarize({}).n, 0u);
}

TEST(Summarize, CompensatedSum) {
  std::vector<double> v(1000001, 0.1);
  v[0] = 1e16;
  auto s = summarize(v);
  EXPECT_NEAR(s.mean * static_cast<double>(v.size()), 1e16 + 100000.0, 8.0);
}

TEST(Aggregate, MicroMacro) {
  std::vector<QueryResult> rs{result(Relation::IsA, 1.0), result(Relation::IsA, 0.0),
                              result(Relation::MadeOf, 1.0)};
  std::vector<std::size_t> ks{1};
  auto a = aggregate(rs, ks);
  EXPECT_NEAR(a.micro.at(1).mean, 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(a.macro.at(1).mean, 0.75);
  EXPECT_NEAR(a.macro.at(1).sem, std::sqrt(0.125) / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(a.per_relation.at(Relation::IsA).at(1).n, 2u);
  EXPECT_THROW(aggregate(std::vector<QueryResult>{}, ks), ContractError);
}

TEST(Aggregate, SingleRelationAndZeros) {
  std::vector<QueryResult> rs{result(Relation::IsA, 0.0), result(Relation::IsA, 0.0)};
  std::vector<std::size_t> ks{1};
  auto a = aggregate(rs, ks);
  EXPECT_DOUBLE_EQ(a.micro.at(1).mean, a.macro.at(1).mean);
  EXPECT_DOUBLE_EQ(a.micro.at(1).mean, 0.0);
  EXPECT_DOUBLE_EQ(a.micro.at(1).sem, 0.0);
}

TEST(Aggregate, MacroInvariantUnderDuplication) {
  std::vector<QueryResult> rs{result(Relation::IsA, 1.0), result(Relation::IsA, 0.0),
                              result(Relation::MadeOf, 1.0)};
  auto dup = rs;
  dup.push_back(rs[0]);
  dup.push_back(rs[1]);
  std::vector<std::size_t> ks{1};
  auto a = aggregate(rs, ks), b = aggregate(dup, ks);
  EXPECT_DOUBLE_EQ(a.macro.at(1).mean, b.macro.at(1).mean);
  EXPECT_NE(a.micro.at(1).mean, b.micro.at(1).mean);
}

TEST(TopWords, Ratios) {
  std::vector<std::vector<std::string>> lists;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> l{"every"};
    if (i < 73) l.push_back("often");
    if (i == 5) l.push_back("once");
    lists.push_back(l);
  }
  auto top = top_word_frequencies(lists, 10);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0], (std::pair<std::string, double>{"every", 1.0}));
  EXPECT_EQ(top[1].first, "often");
  EXPECT_DOUBLE_EQ(top[1].second, 0.73);
  EXPECT_EQ(top_word_frequencies(lists, 1).size(), 1u);
  std::vector<std::vector<std::string>> tie{{"b", "a"}};
  EXPECT_EQ(top_word_frequencies(tie, 2)[0].first, "a");
  EXPECT_THROW(top_word_frequencies(lists, 0), ContractError);
}

TEST(Metrics, BruteForceOracle) {
  std::mt19937_64 rng(20240917);
  for (int i = 0; i < 2000; ++i) {
    auto in = oracle::random_instance(rng);
    ASSERT_EQ(hits_at_k(in.a, in.answers, in.k), oracle::hits(in.a, in.answers, in.k));
    ASSERT_EQ(miss_at_k(in.a, in.opposite, in.k), oracle::hits(in.a, in.opposite, in.k));
    ASSERT_EQ(overlap_at_k(in.a, in.b, in.k), oracle::overlap(in.a, in.b, in.k));
    ASSERT_EQ(overlap_at_k(in.a, in.b, in.k), overlap_at_k(in.b, in.a, in.k));
    for (std::size_t k = 1; k < 55; ++k)
      ASSERT_LE(hits_at_k(in.a, in.answers, k), hits_at_k(in.a, in.answers, k + 1));
  }
}
