#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lmprobe/error.hpp"
#include "lmprobe/grammar.hpp"

using namespace lmprobe;

namespace {

std::vector<std::string> texts(std::string_view sentence, std::string_view subject) {
  std::vector<std::string> out;
  for (const auto& c : expand_grammar(sentence, subject)) out.push_back(c.text);
  return out;
}

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST(PosTag, LexiconAndHeuristics) {
  EXPECT_EQ(pos_tag("two"), PosTag::Number);
  EXPECT_EQ(pos_tag("1698"), PosTag::Number);
  EXPECT_EQ(pos_tag("beautiful"), PosTag::Adjective);
  EXPECT_EQ(pos_tag("xyzzy"), PosTag::Noun);
  EXPECT_EQ(pos_tag("opera"), PosTag::Noun);
  EXPECT_EQ(pos_tag("make"), PosTag::Verb);
  EXPECT_EQ(pos_tag("skywards"), PosTag::Other);
  EXPECT_THROW(pos_tag(""), ContractError);
}

TEST(PosTag, SuffixRulesOnUnknownWords) {
  auto empty = Lexicon::parse("");
  EXPECT_EQ(pos_tag("glorpously", {}, empty), PosTag::Other);
  EXPECT_EQ(pos_tag("glorpous", {}, empty), PosTag::Adjective);
  EXPECT_EQ(pos_tag("glorpful", {}, empty), PosTag::Adjective);
  EXPECT_EQ(pos_tag("glorpive", {}, empty), PosTag::Adjective);
  EXPECT_EQ(pos_tag("42", {}, empty), PosTag::Number);
  EXPECT_EQ(pos_tag("glorp", {}, empty), PosTag::Noun);
}

TEST(PosTag, ContextNudges) {
  auto lex = Lexicon::parse("spring\tnoun,verb\n");
  EXPECT_EQ(pos_tag("spring", {}, lex), PosTag::Noun);
  EXPECT_EQ(pos_tag("spring", {"to", ""}, lex), PosTag::Verb);
  EXPECT_EQ(pos_candidates("spring", lex), (std::vector<PosTag>{PosTag::Noun, PosTag::Verb}));
}

TEST(PosTag, Deterministic) {
  for (auto w : {"make", "two", "spring", "xyzzy", "running"})
    EXPECT_EQ(pos_tag(w), pos_tag(w));
}

TEST(Inflection, Gerunds) {
  EXPECT_EQ(to_gerund("make"), "making");
  EXPECT_EQ(to_gerund("run"), "running");
  EXPECT_EQ(to_gerund("agree"), "agreeing");
  EXPECT_EQ(to_gerund("die"), "dying");
  EXPECT_EQ(to_gerund("be"), "being");
  EXPECT_EQ(to_gerund("fix"), "fixing");
  EXPECT_EQ(to_gerund("play"), "playing");
  EXPECT_EQ(to_gerund("open"), "opening");
}

TEST(Inflection, Plurals) {
  EXPECT_EQ(pluralize("leg"), "legs");
  EXPECT_EQ(pluralize("box"), "boxes");
  EXPECT_EQ(pluralize("church"), "churches");
  EXPECT_EQ(pluralize("city"), "cities");
  EXPECT_EQ(pluralize("day"), "days");
  EXPECT_EQ(pluralize("bus"), "buses");
}

TEST(Inflection, Articles) {
  EXPECT_EQ(indefinite_article("opera"), "an");
  EXPECT_EQ(indefinite_article("hour"), "an");
  EXPECT_EQ(indefinite_article("university"), "a");
  EXPECT_EQ(indefinite_article("dog"), "a");
}

TEST(ExpandGrammar, ArticlesForNounSubject) {
  auto v = texts("opera is a [[OBJ]] .", "opera");
  EXPECT_TRUE(has(v, "an opera is a [[OBJ]] ."));
  EXPECT_TRUE(has(v, "the opera is a [[OBJ]] ."));
}

TEST(ExpandGrammar, GerundForVerbSubject) {
  EXPECT_TRUE(has(texts("make requires [[OBJ]] .", "make"), "making requires [[OBJ]] ."));
}

TEST(ExpandGrammar, PluralAfterNumber) {
  EXPECT_TRUE(has(texts("two leg contains [[OBJ]] .", "two leg"), "two legs contains [[OBJ]] ."));
  EXPECT_FALSE(has(texts("one leg contains [[OBJ]] .", "one leg"), "one legs contains [[OBJ]] ."));
}

TEST(ExpandGrammar, VerbAgreement) {
  EXPECT_TRUE(has(texts("skywards is [[OBJ]] .", "skywards"), "skywards are [[OBJ]] ."));
  EXPECT_TRUE(has(texts("dogs have [[OBJ]] .", "dogs"), "dogs has [[OBJ]] ."));
}

TEST(ExpandGrammar, OriginalFirstAndIndexed) {
  auto v = expand_grammar("opera is a [[OBJ]] .", "opera");
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].text, "opera is a [[OBJ]] .");
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i].variant_index, static_cast<int>(i));
  auto t = texts("opera is a [[OBJ]] .", "opera");
  std::sort(t.begin(), t.end());
  EXPECT_EQ(std::adjacent_find(t.begin(), t.end()), t.end());
}

TEST(ExpandGrammar, SlotIsNeverInflected) {
  auto v = texts("[[OBJ]] is made from milk .", "milk");
  for (const auto& s : v) EXPECT_NE(s.find("[[OBJ]]"), std::string::npos);
  EXPECT_TRUE(has(texts("cheese is [[OBJ]] .", "cheese"), "cheese are [[OBJ]] ."));
  EXPECT_EQ(texts("cheap and [[OBJ]] are opposite .", "cheap").size(), 3u);
}

TEST(ExpandGrammar, IdentityPreservedOnRandomInput) {
  std::mt19937 rng(17);
  const std::vector<std::string> words{"two", "leg", "make", "opera", "is", "are", "the",
                                       "xyzzy", "run", "cheap", "[[OBJ]]", ".", "has"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), len(1, 7);
  for (int i = 0; i < 300; ++i) {
    std::string sentence, subject;
    const auto n = len(rng);
    for (std::size_t k = 0; k < n; ++k) sentence += (k ? " " : "") + words[pick(rng)];
    subject = words[pick(rng)];
    auto v = expand_grammar(sentence, subject);
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v[0].text, sentence);
  }
}

TEST(ExpandGrammar, SubjectAbsentGivesOnlyOriginal) {
  auto v = texts("cats are [[OBJ]] .", "dog");
  EXPECT_EQ(v, std::vector<std::string>{"cats are [[OBJ]] ."});
}
