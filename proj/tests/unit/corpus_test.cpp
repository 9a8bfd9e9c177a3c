#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "../support/corpus_oracle.hpp"
#include "lmprobe/error.hpp"
#include "lmprobe/text.hpp"

using namespace lmprobe;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("lmprobe_corpus_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& body) const {
    auto p = path_ / name;
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << body;
    return p.string();
  }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

std::vector<std::string> matched(const PhraseMatcher& m, std::string_view text) {
  std::vector<PhraseMatcher::Match> found;
  m.find_all(text, found);
  std::vector<std::string> out;
  for (const auto& f : found) out.push_back(m.pattern(f.pattern));
  return out;
}

}  // namespace

TEST(PhraseMatcher, OverlappingAndBoundaries) {
  std::vector<std::string> p{"cat", "cat sat", "at"};
  auto m = PhraseMatcher::compile(p);
  auto got = matched(m, "the cat sat");
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<std::string>{"cat", "cat sat"}));
  EXPECT_TRUE(matched(m, "concatenate").empty());
  EXPECT_EQ(matched(m, "cat,cat").size(), 2u);
  EXPECT_EQ(matched(m, "9cat9").size(), 1u);
}

TEST(PhraseMatcher, NormalizesAndDedups) {
  std::vector<std::string> p{"Goat  Cheese", "goat cheese", "milk"};
  auto m = PhraseMatcher::compile(p);
  EXPECT_EQ(m.pattern_count(), 2u);
  EXPECT_EQ(m.id_of("GOAT cheese"), m.id_of("goat cheese"));
  EXPECT_FALSE(m.id_of("cheese").has_value());
  std::vector<std::string> none;
  EXPECT_THROW(PhraseMatcher::compile(none), ContractError);
  std::vector<std::string> blank{" "};
  EXPECT_THROW(PhraseMatcher::compile(blank), ContractError);
}

TEST(ScanText, CountsOccurrencesAndSentences) {
  std::vector<PhrasePair> pairs{{"cheese", "milk"}};
  auto r = scan_text("Cheese is made from milk. Cheese, cheese! Milk\nmilk and cheese", pairs);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].subject_count, 4u);
  EXPECT_EQ(r[0].object_count, 3u);
  EXPECT_EQ(r[0].joint_count, 2u);
}

TEST(ScanText, TwoSentences) {
  std::vector<PhrasePair> pairs{{"cat", "dog"}};
  EXPECT_EQ(scan_text("the cat sat. a dog ran.", pairs),
            (std::vector<PairFrequency>{{"cat", "dog", 1, 1, 0}}));
}

TEST(ScanText, PhrasesDoNotCrossSentences) {
  std::vector<PhrasePair> pairs{{"goat cheese", "milk"}};
  auto r = scan_text("goat. cheese milk", pairs);
  EXPECT_EQ(r[0].subject_count, 0u);
  EXPECT_EQ(r[0].object_count, 1u);
}

TEST(ScanText, MatchesNaiveOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto text = oracle::synthetic_corpus(40000, seed);
    auto pairs = oracle::corpus_pairs();
    auto got = scan_text(text, pairs);
    EXPECT_EQ(got, oracle::naive_counts(text, pairs)) << seed;
    for (const auto& f : got) EXPECT_LE(f.joint_count, std::min(f.subject_count, f.object_count));
  }
}

TEST(ScanCorpus, ParallelEqualsSerial) {
  TempDir dir;
  std::vector<std::string> files;
  std::string all;
  for (int i = 0; i < 4; ++i) {
    auto body = oracle::synthetic_corpus(30000 + 7000 * static_cast<std::size_t>(i), 10 + i);
    all += body + "\n";
    files.push_back(dir.write("part" + std::to_string(i) + ".txt", body));
  }
  auto pairs = oracle::corpus_pairs();
  ScanOptions serial;
  auto expected = scan_corpus(files, pairs, serial);
  EXPECT_EQ(expected, oracle::naive_counts(all, pairs));
  for (std::size_t shard : {64u, 1000u, 4096u}) {
    for (int threads : {1, 3, 8}) {
      ScanOptions o;
      o.threads = threads;
      o.shard_bytes = shard;
      EXPECT_EQ(scan_corpus(files, pairs, o), expected) << shard << "/" << threads;
    }
  }
}

TEST(ScanCorpus, MissingPhraseInMatcher) {
  std::vector<std::string> phrases{"cheese"};
  auto m = PhraseMatcher::compile(phrases);
  std::vector<PhrasePair> pairs{{"cheese", "milk"}};
  std::vector<std::string> files;
  EXPECT_THROW(scan_corpus(files, m, pairs), ContractError);
}

TEST(CorpusFiles, ListingAndPairs) {
  TempDir dir;
  dir.write("b.txt", "x");
  dir.write("sub/a.txt", "y");
  dir.write("skip.md", "z");
  auto files = list_corpus_files(dir.str());
  ASSERT_EQ(files.size(), 2u);
  EXPECT_TRUE(files[0].ends_with("b.txt"));
  EXPECT_TRUE(files[1].ends_with("sub/a.txt"));
  EXPECT_EQ(list_corpus_files(dir.str() + "/skip.md").size(), 1u);
  EXPECT_THROW(list_corpus_files(dir.str() + "/absent"), IoError);

  auto good = dir.write("pairs.tsv", "cheese\tmilk\nbutter\tcream\n");
  EXPECT_EQ(read_pair_list(good), (std::vector<PhrasePair>{{"cheese", "milk"}, {"butter", "cream"}}));
  auto bad = dir.write("bad.tsv", "cheese\tmilk\nbutter\n");
  try {
    read_pair_list(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
}

TEST(PairTsv, Format) {
  std::vector<PairFrequency> rows{{"cheese", "milk", 3, 4, 2}};
  EXPECT_EQ(format_pair_frequency_tsv(rows),
            "subject\tobject\tsubject_count\tobject_count\tjoint_count\ncheese\tmilk\t3\t4\t2\n");
}

TEST(Buckets, LogDecades) {
  auto b = BucketSpec::log_decades();
  EXPECT_EQ(b.edges, (std::vector<std::uint64_t>{0, 1, 10, 100, 1000}));
  EXPECT_EQ(b.index_of(0), 0u);
  EXPECT_EQ(b.index_of(1), 1u);
  EXPECT_EQ(b.index_of(9), 1u);
  EXPECT_EQ(b.index_of(10), 2u);
  EXPECT_EQ(b.index_of(999), 3u);
  EXPECT_EQ(b.index_of(1u << 30), 4u);
  EXPECT_EQ(BucketSpec::parse("0,5,50").edges, (std::vector<std::uint64_t>{0, 5, 50}));
  EXPECT_THROW(BucketSpec::parse("0,x"), ConfigError);
  EXPECT_THROW((BucketSpec{{1, 2}}.validate()), ContractError);
  EXPECT_THROW((BucketSpec{{0, 5, 5}}.validate()), ContractError);
}

TEST(Buckets, HistogramCoversEverything) {
  std::vector<PairFrequency> rows;
  for (std::uint64_t j : {0u, 0u, 1u, 9u, 10u, 150u, 5000u})
    rows.push_back({"s", "o", 0, 0, j});
  auto h = bucket_joint(rows);
  ASSERT_EQ(h.size(), 5u);
  std::size_t total = 0;
  for (const auto& b : h) total += b.count;
  EXPECT_EQ(total, rows.size());
  EXPECT_EQ(h[0].count, 2u);
  EXPECT_EQ(h[1].count, 2u);
  EXPECT_EQ(h[0].upper, 1u);
  EXPECT_FALSE(h[4].upper.has_value());
  for (std::size_t i = 0; i + 1 < h.size(); ++i) EXPECT_EQ(*h[i].upper, h[i + 1].lower);
}

TEST(Correlate, ModesAndResidue) {
  std::vector<PairFrequency> rows{{"cheese", "milk", 50, 40, 12}, {"bread", "flour", 5, 5, 0},
                                  {"table", "wood", 2000, 30, 3}};
  std::vector<std::string> deep(150, "x");
  deep[120] = "flour";
  std::vector<ProbeHit> hits{
      {"Cheese", Relation::MadeOf, "milk", {"wood", "milk"}, 1},
      {"bread", Relation::MadeOf, "flour", deep, 1},
      {"table", Relation::MadeOf, "wood", {"wood"}, 1},
      {"window", Relation::MadeOf, "glass", {"glass"}, 1},
  };
  auto top100 = correlate_hits(rows, hits, HitMode::Top100);
  ASSERT_EQ(top100.residue.size(), 1u);
  EXPECT_EQ(top100.residue[0].subject, "window");
  EXPECT_EQ(top100.by_joint[0].population, 1u);
  EXPECT_EQ(top100.by_joint[0].hits, 0u);
  EXPECT_EQ(top100.by_joint[1].hits, 1u);
  EXPECT_EQ(top100.by_joint[2].hits, 1u);
  EXPECT_FALSE(top100.by_joint[3].proportion().has_value());
  EXPECT_DOUBLE_EQ(*top100.by_joint[2].proportion(), 1.0);
  // table: joint bucket 1, subject bucket 4.
  EXPECT_EQ(top100.heatmap[1][4].population, 1u);

  auto tight = correlate_hits(rows, hits, HitMode::TopAnswerCount);
  EXPECT_EQ(tight.by_joint[2].hits, 0u);
  EXPECT_EQ(tight.by_joint[1].hits, 1u);

  auto filtered = correlate_hits(rows, hits, HitMode::Top100, BucketSpec::log_decades(),
                                 BucketSpec::log_decades(), 5);
  std::size_t pop = 0;
  for (const auto& c : filtered.by_joint) pop += c.population;
  EXPECT_EQ(pop, 1u);
}
