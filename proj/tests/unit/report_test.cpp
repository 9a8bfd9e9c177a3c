#include <gtest/gtest.h>

#include <filesystem>
#include <nlohmann/json.hpp>

#include "lmprobe/error.hpp"
#include "lmprobe/report.hpp"
#include "lmprobe/text.hpp"

using namespace lmprobe;
using nlohmann::json;

namespace {

AggregateReport sample_report() {
  std::vector<QueryResult> rs;
  auto add = [&](Relation r, double h1, double h10) {
    QueryResult q;
    q.relation = r;
    q.hits[1] = h1;
    q.hits[10] = h10;
    rs.push_back(q);
  };
  add(Relation::MadeOf, 0.073863, 0.5);
  add(Relation::MadeOf, 0.073863, 1.0);
  add(Relation::IsA, 0.073863, 0.25);
  std::vector<std::size_t> ks{1, 10};
  return aggregate(rs, ks);
}

RunManifest manifest() {
  RunManifest m;
  m.scorer = "fixture:abc";
  m.seed = 7;
  m.input_digests["triples"] = fnv1a_hex("x");
  m.config_json = R"({"seed": 7})";
  return m;
}

}  // namespace

TEST(FormatPercent, TwoDecimals) {
  EXPECT_EQ(format_percent(0.073863), "7.39");
  EXPECT_EQ(format_percent(0.0), "0.00");
  EXPECT_EQ(format_percent(1.0), "100.00");
  EXPECT_EQ(format_percent(0.53005), "53.01");
}

TEST(ProbeReport, MicroPercentAndShape) {
  auto text = probe_report_json(sample_report(), manifest());
  auto doc = json::parse(text);
  EXPECT_EQ(doc["micro"]["hits@1"]["mean_pct"], "7.39");
  EXPECT_DOUBLE_EQ(doc["micro"]["hits@1"]["mean"].get<double>(), 0.073863);
  EXPECT_EQ(doc["relations"]["MadeOf"]["n"], 2);
  EXPECT_EQ(doc["manifest"]["seed"], 7);
  EXPECT_EQ(doc["manifest"]["tool_version"], kToolVersion);
  EXPECT_EQ(doc["ks"], json::array({1, 10}));
  EXPECT_TRUE(doc["metadata"].contains("percent_decimals"));
}

TEST(ProbeReport, EmptyIsError) {
  AggregateReport empty;
  empty.ks = {1};
  EXPECT_THROW(probe_report_json(empty, manifest()), ContractError);
}

TEST(ProbeReport, Deterministic) {
  EXPECT_EQ(probe_report_json(sample_report(), manifest()),
            probe_report_json(sample_report(), manifest()));
  EXPECT_EQ(probe_report_csv(sample_report()), probe_report_csv(sample_report()));
  auto other = manifest();
  other.seed = 8;
  EXPECT_NE(probe_report_json(sample_report(), manifest()), probe_report_json(sample_report(), other));
}

TEST(ProbeReport, RoundTrip) {
  auto r = sample_report();
  auto back = parse_probe_report(probe_report_json(r, manifest()));
  EXPECT_EQ(back.ks, r.ks);
  for (auto k : r.ks) {
    EXPECT_DOUBLE_EQ(back.micro.at(k).mean, r.micro.at(k).mean);
    EXPECT_DOUBLE_EQ(back.macro.at(k).sem, r.macro.at(k).sem);
    EXPECT_EQ(back.micro.at(k).n, r.micro.at(k).n);
    for (const auto& [rel, m] : r.per_relation)
      EXPECT_DOUBLE_EQ(back.per_relation.at(rel).at(k).mean, m.at(k).mean);
  }
  EXPECT_THROW(parse_probe_report("{}"), ParseError);
}

TEST(ProbeReport, Csv) {
  auto csv = probe_report_csv(sample_report());
  auto lines = split(csv, '\n');
  EXPECT_EQ(lines[0], "scope,relation,k,n,mean,sem,mean_pct,sem_pct");
  EXPECT_NE(csv.find("micro,,1,3,"), std::string::npos);
  EXPECT_NE(csv.find("relation,MadeOf,10,2,0.75,"), std::string::npos);
}

TEST(ProbeReport, EmitWritesFiles) {
  auto dir = std::filesystem::temp_directory_path() / "lmprobe_report_emit";
  std::filesystem::remove_all(dir);
  emit_probe_report((dir / "nested").string(), sample_report(), manifest());
  EXPECT_EQ(read_file((dir / "nested" / "report.json").string()),
            probe_report_json(sample_report(), manifest()));
  EXPECT_TRUE(std::filesystem::exists(dir / "nested" / "report.csv"));
  std::filesystem::remove_all(dir);
  EXPECT_THROW(write_text_file("/proc/definitely/not/here.txt", "x"), IoError);
}

TEST(PlotData, NullCellsAndChecksum) {
  std::vector<PairFrequency> rows{{"cheese", "milk", 50, 40, 12}, {"bread", "flour", 5, 5, 0},
                                  {"table", "wood", 2, 3, 0}};
  std::vector<ProbeHit> hits{{"cheese", Relation::MadeOf, "milk", {"milk"}, 1}};
  PlotData d;
  d.histograms["joint"] = bucket_joint(rows);
  d.correlations["top100"] = correlate_hits(rows, hits, HitMode::Top100);
  d.top_words["all"] = {{"wood", 0.8}, {"metal", 0.4}};
  d.pair_count = rows.size();
  auto doc = json::parse(plot_data_json(d, manifest()));
  EXPECT_EQ(doc["metadata"]["pair_count"], 3);
  std::size_t sum = 0;
  for (const auto& b : doc["histograms"]["joint"]["buckets"]) sum += b["count"].get<std::size_t>();
  EXPECT_EQ(sum, 3u);
  EXPECT_EQ(doc["histograms"]["joint"]["total"], 3);
  const auto& heat = doc["correlations"]["top100"]["heatmap"];
  EXPECT_TRUE(heat[0][0].is_null());
  EXPECT_DOUBLE_EQ(heat[2][2].get<double>(), 1.0);
  EXPECT_EQ(doc["top_words"]["all"][0]["token"], "wood");
  EXPECT_DOUBLE_EQ(doc["top_words"]["all"][1]["ratio"].get<double>(), 0.4);
}

TEST(RcSummary, GroupsByType) {
  std::vector<ScoredExample> ex{{"a", 1, 1.0, 0.1}, {"b", 0, 0.5, 0.3}, {"c", 0, 0.0, 0.7}};
  std::map<std::string, std::vector<std::string>> labels{{"a", {"synonymy"}},
                                                         {"b", {"synonymy", "typo"}}};
  auto s = summarize_rc(ex, labels, default_similarity_edges());
  EXPECT_EQ(s.overall.count, 3u);
  EXPECT_NEAR(s.overall.em, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(s.by_type.at("synonymy").count, 2u);
  EXPECT_DOUBLE_EQ(s.by_type.at("synonymy").f1, 0.75);
  EXPECT_EQ(s.by_type.at("unlabeled").count, 1u);
  auto doc = json::parse(rc_report_json(s, manifest()));
  EXPECT_TRUE(doc.contains("overall"));
}
