#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "lmprobe/error.hpp"
#include "lmprobe/qa.hpp"

using namespace lmprobe;

namespace {

const std::string kData = LMPROBE_TEST_DATA;

std::string expect_parse_error(const std::string& json) {
  try {
    parse_squad(json, "t.json");
  } catch (const ParseError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ParseError";
  return {};
}

}  // namespace

TEST(ReadSquad, Sample) {
  auto ex = read_squad(kData + "/squad_sample.json");
  ASSERT_EQ(ex.size(), 4u);
  EXPECT_EQ(ex[0].id, "q-rare");
  EXPECT_EQ(ex[0].title, "Climate");
  EXPECT_EQ(ex[0].gold_answers, std::vector<std::string>{"very rare"});
  EXPECT_EQ(ex[0].context.substr(ex[0].answer_spans[0].start, 9), "very rare");
  EXPECT_EQ(ex[1].id, "q-none");
  EXPECT_TRUE(ex[1].is_impossible);
  EXPECT_TRUE(ex[1].gold_answers.empty());
  EXPECT_EQ(ex[2].gold_answers.size(), 2u);
  for (const auto& e : ex) EXPECT_EQ(e.style, DatasetStyle::Squad);
}

TEST(ReadSquad, MinimalArticle) {
  auto ex = parse_squad(R"({"data": [{"title": "T", "paragraphs": [{"context": "abc def",
      "qas": [{"id": "1", "question": "q?", "answers": [{"text": "def", "answer_start": 4}]}]}]}]})");
  ASSERT_EQ(ex.size(), 1u);
  EXPECT_EQ(ex[0].gold_answers[0], "def");
  EXPECT_FALSE(ex[0].is_impossible);
}

TEST(ReadSquad, SchemaErrorsCarryJsonPath) {
  auto msg = expect_parse_error(R"({"data": [{"title": "T", "paragraphs": [{"context": "abc",
      "qas": [{"id": "1", "question": "q", "answers": [{"text": "zzz", "answer_start": 0}]}]}]}]})");
  EXPECT_NE(msg.find("t.json"), std::string::npos) << msg;
  EXPECT_NE(msg.find("$.data[0].paragraphs[0].qas[0].answers[0]"), std::string::npos) << msg;
  msg = expect_parse_error(R"({"data": [{"title": "T", "paragraphs": [{"qas": []}]}]})");
  EXPECT_NE(msg.find("$.data[0].paragraphs[0]"), std::string::npos) << msg;
  expect_parse_error(R"({"data": 3})");
  expect_parse_error("[");
  expect_parse_error(R"({"data": [{"title": "T", "paragraphs": [{"context": "abc",
      "qas": [{"id": "1", "question": "q", "is_impossible": true, "answers": [{"text": "a", "answer_start": 0}]}]}]}]})");
  EXPECT_THROW(read_squad(kData + "/absent.json"), IoError);
}

TEST(ReadRecord, Sample) {
  auto ex = read_record(kData + "/record_sample.json");
  ASSERT_EQ(ex.size(), 1u);
  const auto& e = ex[0];
  EXPECT_EQ(e.id, "r-rare");
  EXPECT_EQ(e.title, "p-tucson");
  EXPECT_EQ(e.style, DatasetStyle::Record);
  ASSERT_EQ(e.entities.size(), 2u);
  EXPECT_EQ(e.context.substr(e.entities[1].start, e.entities[1].end - e.entities[1].start + 1),
            "Tucson");
  EXPECT_EQ(e.gold_answers, std::vector<std::string>{"Tucson"});
  EXPECT_THROW(parse_record(R"({"data": [{"id": "p", "passage": {"text": "abc", "entities": [{"start": 2, "end": 9}]}, "qas": []}]})"),
               ParseError);
}

TEST(FormatDataset, SquadRoundTrip) {
  auto ex = read_squad(kData + "/squad_sample.json");
  auto again = parse_squad(format_dataset(ex, DatasetStyle::Squad));
  ASSERT_EQ(again.size(), ex.size());
  for (std::size_t i = 0; i < ex.size(); ++i) {
    EXPECT_EQ(again[i].id, ex[i].id);
    EXPECT_EQ(again[i].title, ex[i].title);
    EXPECT_EQ(again[i].question, ex[i].question);
    EXPECT_EQ(again[i].context, ex[i].context);
    EXPECT_EQ(again[i].gold_answers, ex[i].gold_answers);
    EXPECT_EQ(again[i].is_impossible, ex[i].is_impossible);
  }
  EXPECT_EQ(format_dataset(ex, DatasetStyle::Squad), format_dataset(again, DatasetStyle::Squad));
}

TEST(FormatDataset, RecordRoundTrip) {
  auto ex = read_record(kData + "/record_sample.json");
  auto again = parse_record(format_dataset(ex, DatasetStyle::Record));
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0].context, ex[0].context);
  EXPECT_EQ(again[0].question, ex[0].question);
  EXPECT_EQ(again[0].entities.size(), 2u);
}

TEST(SideFiles, PredictionsTypesTriples) {
  auto p = read_predictions(kData + "/rc_predictions.json");
  EXPECT_EQ(p.size(), 5u);
  EXPECT_EQ(p.at("q-rare"), "very rare");
  auto t = read_type_labels(kData + "/rc_types.json");
  EXPECT_EQ(t.at("q-none"), std::vector<std::string>{"others"});
  EXPECT_EQ(t.at("q-punish").size(), 2u);
  auto tr = read_example_triples(kData + "/example_triples.tsv");
  EXPECT_EQ(tr.size(), 5u);
  EXPECT_EQ(tr.at("q-uv")[0].object, "ultraviolet radiation");
  EXPECT_EQ(tr.at("q-uv")[0].relation, Relation::Synonym);

  auto dir = std::filesystem::temp_directory_path() / "lmprobe_qa_io";
  std::filesystem::create_directories(dir);
  auto bad = (dir / "types.json").string();
  std::ofstream(bad) << R"({"q": ["vibes"]})";
  EXPECT_THROW(read_type_labels(bad), ParseError);
  std::filesystem::remove_all(dir);
}
