#include "lmprobe/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "lmprobe/error.hpp"

namespace lmprobe {

using nlohmann::json;

namespace {

std::string k_key(std::size_t k) { return "hits@" + std::to_string(k); }

json summary_json(const Summary& s) {
  return {{"mean", s.mean},
          {"mean_pct", format_percent(s.mean)},
          {"n", s.n},
          {"sem", s.sem},
          {"sem_pct", format_percent(s.sem)}};
}

json by_k(const std::map<std::size_t, Summary>& m, const std::string& prefix = "hits@") {
  json out = json::object();
  for (const auto& [k, s] : m) out[prefix + std::to_string(k)] = summary_json(s);
  return out;
}

json manifest_json(const RunManifest& m) {
  json config;
  try {
    config = json::parse(m.config_json);
  } catch (const json::parse_error&) {
    config = m.config_json;
  }
  return {{"config", config},
          {"inputs", m.input_digests},
          {"scorer", m.scorer},
          {"seed", m.seed},
          {"tool_version", m.tool_version}};
}

json statistics_metadata() {
  return {{"macro_sem", "standard deviation of per-relation means / sqrt(number of relations)"},
          {"percent_decimals", 2},
          {"sem", "sample standard deviation / sqrt(n)"}};
}

json top_words_json(const std::vector<std::pair<std::string, double>>& rows) {
  json out = json::array();
  for (const auto& [token, ratio] : rows) out.push_back({{"ratio", ratio}, {"token", token}});
  return out;
}

Summary read_summary(const json& j) {
  Summary s;
  s.mean = j.at("mean").get<double>();
  s.sem = j.at("sem").get<double>();
  s.n = j.at("n").get<std::size_t>();
  return s;
}

std::map<std::size_t, Summary> read_by_k(const json& j, const std::vector<std::size_t>& ks) {
  std::map<std::size_t, Summary> out;
  for (auto k : ks) out[k] = read_summary(j.at(k_key(k)));
  return out;
}

std::string csv_row(const std::string& scope, const std::string& name, std::size_t k,
                    const Summary& s) {
  char buf[128];
  std::snprintf(buf, sizeof buf, ",%zu,%zu,%.17g,%.17g,", k, s.n, s.mean, s.sem);
  return scope + "," + name + buf + format_percent(s.mean) + "," + format_percent(s.sem) + "\n";
}

json histogram_json(const std::vector<HistogramBucket>& buckets) {
  json rows = json::array();
  std::size_t total = 0;
  for (const auto& b : buckets) {
    rows.push_back({{"count", b.count},
                    {"lower", b.lower},
                    {"upper", b.upper ? json(*b.upper) : json(nullptr)}});
    total += b.count;
  }
  return {{"buckets", rows}, {"total", total}};
}

json cell_json(const CorrelationCell& c) {
  auto p = c.proportion();
  return p ? json(*p) : json(nullptr);
}

json group_json(const RcGroup& g) {
  return {{"count", g.count},
          {"em", g.em},
          {"em_pct", format_percent(g.em)},
          {"f1", g.f1},
          {"f1_pct", format_percent(g.f1)}};
}

}  // namespace

std::string format_percent(double ratio) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", ratio * 100.0);
  return buf;
}

std::string probe_report_json(const AggregateReport& report, const RunManifest& manifest,
                              const ProbeRun* run) {
  if (report.per_relation.empty()) throw ContractError("report has no relations");
  json relations = json::object();
  for (const auto& [rel, stats] : report.per_relation) {
    auto entry = by_k(stats);
    entry["n"] = stats.empty() ? 0 : stats.begin()->second.n;
    relations[std::string(relation_name(rel))] = entry;
  }
  json doc = {{"ks", report.ks},
              {"macro", by_k(report.macro)},
              {"manifest", manifest_json(manifest)},
              {"metadata", statistics_metadata()},
              {"micro", by_k(report.micro)},
              {"relations", relations}};
  if (run) {
    doc["queries"] = run->records.size();
    doc["multi_token_answers"] = run->multi_token_answers;
    if (!run->top_words.empty()) {
      json per_rel = json::object();
      for (const auto& [rel, rows] : run->top_words_by_relation)
        per_rel[std::string(relation_name(rel))] = top_words_json(rows);
      doc["top_words"] = {{"all", top_words_json(run->top_words)}, {"by_relation", per_rel}};
    }
    if (run->template_average) {
      doc["template_average"] = {{"macro", by_k(run->template_average->macro)},
                                 {"micro", by_k(run->template_average->micro)}};
    }
  }
  return doc.dump(2) + "\n";
}

std::string probe_report_csv(const AggregateReport& report) {
  if (report.per_relation.empty()) throw ContractError("report has no relations");
  std::string out = "scope,relation,k,n,mean,sem,mean_pct,sem_pct\n";
  for (auto k : report.ks) out += csv_row("micro", "", k, report.micro.at(k));
  for (auto k : report.ks) out += csv_row("macro", "", k, report.macro.at(k));
  for (const auto& [rel, stats] : report.per_relation)
    for (auto k : report.ks) out += csv_row("relation", std::string(relation_name(rel)), k, stats.at(k));
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::error_code ec;
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("write failed: " + path);
}

void emit_probe_report(const std::string& dir, const AggregateReport& report,
                       const RunManifest& manifest, const ProbeRun* run) {
  const auto json_text = probe_report_json(report, manifest, run);
  const auto csv_text = probe_report_csv(report);
  const std::filesystem::path base(dir);
  write_text_file((base / "report.json").string(), json_text);
  write_text_file((base / "report.csv").string(), csv_text);
}

AggregateReport parse_probe_report(std::string_view json_text) {
  try {
    const auto doc = json::parse(json_text);
    AggregateReport r;
    r.ks = doc.at("ks").get<std::vector<std::size_t>>();
    r.micro = read_by_k(doc.at("micro"), r.ks);
    r.macro = read_by_k(doc.at("macro"), r.ks);
    for (auto it = doc.at("relations").begin(); it != doc.at("relations").end(); ++it) {
      auto rel = parse_relation(it.key());
      if (!rel) throw ParseError("unknown relation in report: " + it.key());
      r.per_relation[*rel] = read_by_k(it.value(), r.ks);
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

std::string opposite_report_json(const OppositeRun& run, const RunManifest& manifest) {
  if (run.pairs.empty()) throw ContractError("opposite report has no relation pairs");
  json pairs = json::array();
  for (const auto& p : run.pairs) {
    const std::string pos(relation_name(p.relation_pos)), neg(relation_name(p.relation_neg));
    pairs.push_back({{"miss", {{pos + " graded by " + neg, by_k(p.miss_pos, "miss@")},
                               {neg + " graded by " + pos, by_k(p.miss_neg, "miss@")}}},
                     {"overlap", by_k(p.overlap, "overlap@")},
                     {"relation_neg", neg},
                     {"relation_pos", pos},
                     {"subjects", p.subjects}});
  }
  json doc = {{"ks", run.ks},
              {"manifest", manifest_json(manifest)},
              {"metadata", statistics_metadata()},
              {"pairs", pairs}};
  return doc.dump(2) + "\n";
}

std::string opposite_report_csv(const OppositeRun& run) {
  std::string out = "metric,relation,graded_by,k,n,mean,sem,mean_pct,sem_pct\n";
  for (const auto& p : run.pairs) {
    const std::string pos(relation_name(p.relation_pos)), neg(relation_name(p.relation_neg));
    for (auto k : run.ks) out += csv_row("overlap", pos + "," + neg, k, p.overlap.at(k));
    for (auto k : run.ks) out += csv_row("miss", pos + "," + neg, k, p.miss_pos.at(k));
    for (auto k : run.ks) out += csv_row("miss", neg + "," + pos, k, p.miss_neg.at(k));
  }
  return out;
}

std::string plot_data_json(const PlotData& data, const RunManifest& manifest) {
  json histograms = json::object();
  for (const auto& [name, h] : data.histograms) histograms[name] = histogram_json(h);

  json correlations = json::object();
  for (const auto& [name, c] : data.correlations) {
    json by_joint = json::array();
    for (const auto& cell : c.by_joint)
      by_joint.push_back({{"hits", cell.hits}, {"population", cell.population}, {"proportion", cell_json(cell)}});
    json heat = json::array();
    for (const auto& row : c.heatmap) {
      json r = json::array();
      for (const auto& cell : row) r.push_back(cell_json(cell));
      heat.push_back(std::move(r));
    }
    json residue = json::array();
    for (const auto& h : c.residue)
      residue.push_back({{"object", h.object},
                         {"relation", relation_name(h.relation)},
                         {"subject", h.subject}});
    correlations[name] = {{"by_joint", by_joint},
                          {"heatmap", heat},
                          {"joint_buckets", histogram_json(c.joint_buckets)},
                          {"min_joint", c.min_joint},
                          {"mode", c.mode == HitMode::Top100 ? "top100" : "top_answer_count"},
                          {"residue", residue},
                          {"subject_buckets", histogram_json(c.subject_buckets)}};
  }

  json top = json::object();
  for (const auto& [name, rows] : data.top_words) top[name] = top_words_json(rows);

  json meta = json::object();
  if (data.pair_count) meta["pair_count"] = *data.pair_count;
  json doc = {{"correlations", correlations},
              {"histograms", histograms},
              {"manifest", manifest_json(manifest)},
              {"metadata", meta},
              {"top_words", top}};
  return doc.dump(2) + "\n";
}

RcSummary summarize_rc(std::span<const ScoredExample> examples,
                       const std::map<std::string, std::vector<std::string>>& type_labels,
                       std::span<const double> similarity_edges) {
  RcSummary s;
  std::map<std::string, std::pair<double, double>> sums;
  double em = 0.0, f1 = 0.0;
  for (const auto& e : examples) {
    em += e.em;
    f1 += e.f1;
    auto it = type_labels.find(e.id);
    std::vector<std::string> labels{"unlabeled"};
    if (it != type_labels.end() && !it->second.empty()) labels = it->second;
    for (const auto& l : labels) {
      ++s.by_type[l].count;
      sums[l].first += e.em;
      sums[l].second += e.f1;
    }
  }
  s.overall.count = examples.size();
  if (!examples.empty()) {
    s.overall.em = em / static_cast<double>(examples.size());
    s.overall.f1 = f1 / static_cast<double>(examples.size());
  }
  for (auto& [l, g] : s.by_type) {
    g.em = sums[l].first / static_cast<double>(g.count);
    g.f1 = sums[l].second / static_cast<double>(g.count);
  }
  s.similarity = similarity_performance_table(examples, similarity_edges);
  return s;
}

std::string rc_report_json(const RcSummary& summary, const RunManifest& manifest) {
  json types = json::object();
  for (const auto& [l, g] : summary.by_type) types[l] = group_json(g);
  json sim = json::array();
  for (const auto& b : summary.similarity) {
    sim.push_back({{"count", b.count},
                   {"lower", b.lower},
                   {"mean_em", b.count ? json(b.mean_em) : json(nullptr)},
                   {"mean_f1", b.count ? json(b.mean_f1) : json(nullptr)},
                   {"upper", b.upper ? json(*b.upper) : json(nullptr)}});
  }
  json doc = {{"by_type", types},
              {"manifest", manifest_json(manifest)},
              {"overall", group_json(summary.overall)},
              {"similarity", sim}};
  return doc.dump(2) + "\n";
}

}  // namespace lmprobe
