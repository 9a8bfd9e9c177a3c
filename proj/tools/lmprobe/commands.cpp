#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <set>

#include <nlohmann/json.hpp>

#include "lmprobe/corpus.hpp"
#include "lmprobe/error.hpp"
#include "lmprobe/kb.hpp"
#include "lmprobe/probe.hpp"
#include "lmprobe/qa.hpp"
#include "lmprobe/report.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool g_quiet = false;

template <class... Args>
void note(const char* fmt, Args... args) {
  if (g_quiet) return;
  std::fprintf(stderr, fmt, args...);
  std::fputc('\n', stderr);
}

std::string out_path(const Config& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

std::string file_digest(const std::string& path) { return fnv1a_hex(read_file(path)); }

RunManifest manifest_for(const Config& cfg, const Scorer* scorer) {
  RunManifest m;
  m.seed = cfg.seed;
  m.scorer = scorer ? scorer->identity() : "none";
  m.config_json = cfg.to_json();
  return m;
}

TemplateSet templates_for(const Config& cfg, const std::string& override_path) {
  if (!override_path.empty()) return TemplateSet::load(override_path);
  if (cfg.templates_path) return TemplateSet::load(*cfg.templates_path);
  return TemplateSet::builtin();
}

void add_template_digest(RunManifest& m, const Config& cfg, const std::string& override_path) {
  const auto path = !override_path.empty() ? override_path : cfg.templates_path.value_or("");
  m.input_digests["templates"] = path.empty() ? "builtin" : file_digest(path);
}

IngestResult ingest(const Config& cfg, const std::string& path, const RelationSet& relations) {
  IngestOptions io;
  io.relations = relations;
  io.language = cfg.language;
  io.strict = cfg.strict;
  auto r = ingest_conceptnet(path, io);
  for (const auto& w : r.warnings) note("warning: %s", w.c_str());
  note("read %zu triples (%zu malformed, %zu filtered, %zu duplicate rows)", r.triples.size(),
       r.malformed_rows, r.filtered_rows, r.duplicate_rows);
  if (r.triples.empty()) throw ConfigError("no triples left after filtering " + path);
  return r;
}

DatasetStyle parse_style(const std::string& s) {
  if (s == "squad") return DatasetStyle::Squad;
  if (s == "record") return DatasetStyle::Record;
  throw ConfigError("unknown dataset style '" + s + "'");
}

std::vector<QAExample> read_dataset(const std::string& path, DatasetStyle style) {
  return style == DatasetStyle::Squad ? read_squad(path) : read_record(path);
}

json triple_json(const Triple& t) {
  return {{"object", t.object}, {"relation", relation_name(t.relation)}, {"subject", t.subject}};
}

void write_folds(const Config& cfg, std::span<const Triple> triples, int n) {
  const auto folds = split_folds(triples, n, cfg.seed);
  for (int i = 0; i < n; ++i) {
    std::string text;
    for (const auto& t : folds.fold(i)) text += format_triple_tsv(t) + "\n";
    write_text_file(out_path(cfg, "folds/fold_" + std::to_string(i) + ".tsv"), text);
  }
  json rotations = json::array();
  for (const auto& r : folds.rotations()) {
    rotations.push_back({{"test", r.test},
                         {"train", r.train},
                         {"validation", r.validation ? json(*r.validation) : json(nullptr)}});
  }
  json doc = {{"n_folds", n}, {"rotations", rotations}, {"seed", cfg.seed}, {"sizes", folds.fold_sizes()}};
  write_text_file(out_path(cfg, "folds/rotations.json"), doc.dump(2) + "\n");
  note("wrote %d folds to %s", n, out_path(cfg, "folds").c_str());
}

struct PredictionLine {
  std::string subject;
  Relation relation{};
  std::vector<std::string> answers;
  std::vector<std::string> tokens;
};

std::vector<PredictionLine> read_prediction_lines(const std::string& path) {
  std::vector<PredictionLine> out;
  std::size_t line_no = 0;
  for (const auto& line : split(read_file(path), '\n')) {
    ++line_no;
    if (collapse_whitespace(line).empty()) continue;
    const auto where = path + ":" + std::to_string(line_no);
    try {
      const auto j = json::parse(line);
      PredictionLine p;
      p.subject = j.at("subject").get<std::string>();
      auto rel = parse_relation(j.at("relation").get<std::string>());
      if (!rel) throw ParseError(where + ": unknown relation");
      p.relation = *rel;
      p.answers = j.at("answers").get<std::vector<std::string>>();
      for (const auto& e : j.at("predictions")) p.tokens.push_back(e.at("token").get<std::string>());
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return out;
}

std::string table_cell(const Summary& s) {
  return format_percent(s.mean) + " ± " + format_percent(s.sem);
}

}  // namespace

Config Global::resolve() const {
  g_quiet = quiet;
  Config c = config_path.empty() ? Config{} : Config::load(config_path);
  if (seed) c.seed = *seed;
  if (!scorer.empty()) c.scorer = scorer;
  if (!ks.empty()) c.ks = parse_ks(ks);
  if (!out.empty()) c.out_dir = out;
  if (!fixture.empty()) c.fixture_path = fixture;
  if (!ngram_corpus.empty()) c.ngram_corpus = ngram_corpus;
  if (threads) {
    c.threads = *threads;
    c.scan_threads = *threads;
  }
  return c;
}

int run_probe_command(const Global& g, const ProbeArgs& a) {
  auto cfg = g.resolve();
  if (!a.relations.empty()) cfg.relations = RelationSet::parse(a.relations);
  cfg.compare_templates = cfg.compare_templates || a.compare_templates;
  cfg.multi_token = cfg.multi_token || a.multi_token;
  const auto templates = templates_for(cfg, a.templates);

  const auto ingested = ingest(cfg, a.triples, cfg.relations);
  if (a.split_folds > 0) write_folds(cfg, ingested.triples, a.split_folds);

  const auto queries = group_queries(ingested.triples);
  const auto scorer = make_scorer(cfg.scorer_spec());
  note("probing %zu queries with %s", queries.size(), scorer->identity().c_str());
  const auto run = run_probe(queries, templates, *scorer, cfg.probe_options());

  auto manifest = manifest_for(cfg, scorer.get());
  manifest.input_digests["triples"] = file_digest(a.triples);
  add_template_digest(manifest, cfg, a.templates);
  emit_probe_report(cfg.out_dir, run.aggregate, manifest, &run);
  if (cfg.write_predictions)
    write_text_file(out_path(cfg, "predictions.jsonl"), format_predictions_jsonl(run.records));

  for (auto k : run.aggregate.ks)
    note("hits@%zu  micro %s  macro %s", k, table_cell(run.aggregate.micro.at(k)).c_str(),
         table_cell(run.aggregate.macro.at(k)).c_str());
  note("wrote %s", out_path(cfg, "report.json").c_str());
  return 0;
}

int run_opposite_command(const Global& g, const OppositeArgs& a) {
  auto cfg = g.resolve();
  if (!a.pairs.empty()) cfg.opposite_pairs = parse_relation_pairs(a.pairs);
  const auto templates = templates_for(cfg, a.templates);

  RelationSet wanted;
  for (const auto& [pos, neg] : cfg.opposite_pairs) {
    wanted.insert(pos);
    wanted.insert(neg);
  }
  const auto ingested = ingest(cfg, a.triples, wanted);
  const auto probes = build_opposite_probes(ingested.triples, cfg.opposite_pairs);
  if (probes.empty()) throw ConfigError("no subject has answers on both sides of any pair");

  const auto scorer = make_scorer(cfg.scorer_spec());
  note("probing %zu opposite subjects with %s", probes.size(), scorer->identity().c_str());
  const auto run = run_opposite(probes, templates, *scorer, cfg.probe_options());

  auto manifest = manifest_for(cfg, scorer.get());
  manifest.input_digests["triples"] = file_digest(a.triples);
  add_template_digest(manifest, cfg, a.templates);
  write_text_file(out_path(cfg, "opposite.json"), opposite_report_json(run, manifest));
  write_text_file(out_path(cfg, "opposite.csv"), opposite_report_csv(run));
  note("wrote %s", out_path(cfg, "opposite.json").c_str());
  return 0;
}

int run_freq_command(const Global& g, const FreqArgs& a) {
  auto cfg = g.resolve();
  if (!a.joint_edges.empty()) cfg.joint_edges = BucketSpec::parse(a.joint_edges);
  if (!a.subject_edges.empty()) cfg.subject_edges = BucketSpec::parse(a.subject_edges);
  if (a.min_joint) cfg.min_joint = *a.min_joint;

  std::vector<PredictionLine> lines;
  if (!a.predictions.empty()) lines = read_prediction_lines(a.predictions);

  std::vector<PhrasePair> pairs;
  if (!a.pairs.empty()) {
    pairs = read_pair_list(a.pairs);
  } else if (!lines.empty()) {
    std::set<PhrasePair> seen;
    for (const auto& l : lines)
      for (const auto& ans : l.answers) {
        PhrasePair p{normalize_phrase(l.subject), normalize_phrase(ans)};
        if (seen.insert(p).second) pairs.push_back(std::move(p));
      }
  }
  if (pairs.empty()) throw ConfigError("freq needs --pairs or --predictions");

  const auto files = list_corpus_files(a.corpus);
  if (files.empty()) throw IoError("no .txt files under " + a.corpus);
  note("scanning %zu files for %zu pairs", files.size(), pairs.size());
  const auto freqs = scan_corpus(files, pairs, cfg.scan_options());
  write_text_file(out_path(cfg, "pair_frequency.tsv"), format_pair_frequency_tsv(freqs));

  PlotData plot;
  plot.pair_count = freqs.size();
  plot.histograms["joint_count"] = bucket_joint(freqs, cfg.joint_edges);
  if (!lines.empty()) {
    std::vector<ProbeHit> hits;
    std::vector<std::vector<std::string>> top10;
    for (const auto& l : lines) {
      for (const auto& ans : l.answers)
        hits.push_back({l.subject, l.relation, ans, l.tokens, l.answers.size()});
      top10.emplace_back(l.tokens.begin(), l.tokens.begin() + std::min<std::size_t>(10, l.tokens.size()));
    }
    plot.correlations["top100"] = correlate_hits(freqs, hits, HitMode::Top100, cfg.joint_edges,
                                                 cfg.subject_edges, cfg.min_joint);
    plot.correlations["top_answer_count"] = correlate_hits(
        freqs, hits, HitMode::TopAnswerCount, cfg.joint_edges, cfg.subject_edges, cfg.min_joint);
    plot.top_words["all"] = top_word_frequencies(top10, cfg.top_words);
    if (const auto n = plot.correlations["top100"].residue.size())
      note("warning: %zu probed triples have no frequency row", n);
  }

  auto manifest = manifest_for(cfg, nullptr);
  const fs::path root = fs::is_directory(a.corpus) ? fs::path(a.corpus) : fs::path(a.corpus).parent_path();
  std::string listing;
  for (const auto& f : files)
    listing += fs::relative(f, root).string() + "\t" + std::to_string(fs::file_size(f)) + "\n";
  manifest.input_digests["corpus_listing"] = fnv1a_hex(listing);
  if (!a.pairs.empty()) manifest.input_digests["pairs"] = file_digest(a.pairs);
  if (!a.predictions.empty()) manifest.input_digests["predictions"] = file_digest(a.predictions);
  write_text_file(out_path(cfg, "plot_data.json"), plot_data_json(plot, manifest));
  note("wrote %s", out_path(cfg, "pair_frequency.tsv").c_str());
  return 0;
}

int run_augment_command(const Global& g, const AugmentArgs& a) {
  auto cfg = g.resolve();
  const auto style = parse_style(a.style);
  const auto templates = templates_for(cfg, a.templates);
  auto examples = read_dataset(a.dataset, style);
  const auto by_id = read_example_triples(a.triples);

  std::set<std::string> ids;
  std::string log;
  std::size_t applied = 0, skipped = 0;
  for (auto& ex : examples) {
    ids.insert(ex.id);
    auto it = by_id.find(ex.id);
    if (it == by_id.end()) continue;
    auto r = integrate_knowledge(ex, it->second, templates);
    json ap = json::array(), sk = json::array();
    for (const auto& x : r.pair.applied) {
      auto t = triple_json(x.triple);
      t["site"] = site_name(x.site);
      t["position"] = x.position;
      t["length"] = x.length;
      ap.push_back(std::move(t));
    }
    for (const auto& x : r.skipped) {
      auto t = triple_json(x.triple);
      t["reason"] = x.reason;
      sk.push_back(std::move(t));
    }
    applied += r.pair.applied.size();
    skipped += r.skipped.size();
    log += json{{"applied", ap}, {"id", ex.id}, {"skipped", sk}}.dump() + "\n";
    ex = std::move(r.example);
  }
  for (const auto& [id, ts] : by_id)
    if (!ids.count(id)) note("warning: %zu triples refer to unknown example %s", ts.size(), id.c_str());

  write_text_file(out_path(cfg, "augmented.json"), format_dataset(examples, style));
  write_text_file(out_path(cfg, "augment_log.jsonl"), log);
  note("applied %zu triples, skipped %zu; wrote %s", applied, skipped,
       out_path(cfg, "augmented.json").c_str());
  return 0;
}

int run_score_rc_command(const Global& g, const ScoreRcArgs& a) {
  auto cfg = g.resolve();
  const auto style = parse_style(a.style);
  if (!a.edges.empty()) {
    cfg.similarity_edges.clear();
    for (const auto& part : split(a.edges, ',')) {
      try {
        cfg.similarity_edges.push_back(std::stod(part));
      } catch (const std::exception&) {
        throw ConfigError("bad similarity edge: " + part);
      }
    }
  }
  const auto examples = read_dataset(a.dataset, style);
  const auto predictions = read_predictions(a.predictions);
  std::map<std::string, std::vector<std::string>> types;
  if (!a.types.empty()) types = read_type_labels(a.types);

  std::vector<std::string> docs;
  std::set<std::string> contexts;
  for (const auto& ex : examples) {
    docs.push_back(ex.question);
    if (contexts.insert(ex.context).second) docs.push_back(ex.context);
  }
  const auto df = DocumentFrequency::build(docs);

  std::vector<ScoredExample> scored;
  std::size_t missing = 0;
  std::string tsv = "id\tem\tf1\tsimilarity\n";
  for (const auto& ex : examples) {
    auto it = predictions.find(ex.id);
    std::string pred;
    if (it == predictions.end()) ++missing;
    else pred = it->second;
    ScoredExample s{ex.id, static_cast<double>(exact_match(pred, ex.gold_answers)),
                    f1_score(pred, ex.gold_answers), tfidf_cosine(ex.question, ex.context, df)};
    char buf[96];
    std::snprintf(buf, sizeof buf, "\t%.0f\t%.6f\t%.6f\n", s.em, s.f1, s.similarity);
    tsv += ex.id + buf;
    scored.push_back(std::move(s));
  }
  if (missing) note("warning: %zu examples have no prediction (scored as empty answers)", missing);

  const auto summary = summarize_rc(scored, types, cfg.similarity_edges);
  auto manifest = manifest_for(cfg, nullptr);
  manifest.input_digests["dataset"] = file_digest(a.dataset);
  manifest.input_digests["predictions"] = file_digest(a.predictions);
  if (!a.types.empty()) manifest.input_digests["types"] = file_digest(a.types);
  write_text_file(out_path(cfg, "rc_metrics.json"), rc_report_json(summary, manifest));
  write_text_file(out_path(cfg, "rc_scores.tsv"), tsv);
  note("EM %s  F1 %s over %zu examples", format_percent(summary.overall.em).c_str(),
       format_percent(summary.overall.f1).c_str(), summary.overall.count);
  return 0;
}

int run_report_command(const Global& g, const ReportArgs& a) {
  g_quiet = g.quiet;
  const auto report = parse_probe_report(read_file(a.input));

  std::string header = "relation";
  header.resize(28, ' ');
  header += "     n";
  for (auto k : report.ks) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "  %16s", ("hits@" + std::to_string(k)).c_str());
    header += buf;
  }
  std::printf("%s\n", header.c_str());

  auto row = [&](const std::string& name, const std::map<std::size_t, Summary>& stats) {
    std::string line = name;
    if (line.size() < 28) line.resize(28, ' ');
    char buf[64];
    std::snprintf(buf, sizeof buf, "%6zu", stats.empty() ? std::size_t{0} : stats.begin()->second.n);
    line += buf;
    for (auto k : report.ks) {
      std::snprintf(buf, sizeof buf, "  %16s", table_cell(stats.at(k)).c_str());
      line += buf;
    }
    std::printf("%s\n", line.c_str());
  };
  for (const auto& [rel, stats] : report.per_relation) row(std::string(relation_name(rel)), stats);
  row("micro", report.micro);
  row("macro", report.macro);

  if (!g.out.empty()) {
    const auto path = (fs::path(g.out) / "report.csv").string();
    write_text_file(path, probe_report_csv(report));
    note("wrote %s", path.c_str());
  }
  return 0;
}

}  // namespace lmprobe::cli
