#include <cstdio>
#include <functional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "lmprobe/error.hpp"

using namespace lmprobe::cli;

int main(int argc, char** argv) {
  CLI::App app{"Cloze-style knowledge probing for language models", "lmprobe"};
  app.set_version_flag("--version", "lmprobe 0.3.0");
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--scorer", g.scorer, "Scorer: URL, builtin:fixture or builtin:ngram");
  app.add_option("--k", g.ks, "Comma separated K values, e.g. 1,10,100");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--fixture", g.fixture, "Playback table for builtin:fixture");
  app.add_option("--ngram-corpus", g.ngram_corpus, "Training text for builtin:ngram");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", g.quiet, "Suppress progress output");

  std::function<int()> action;

  ProbeArgs probe;
  auto* p = app.add_subcommand("probe", "Probe hits@K over knowledge triples");
  p->add_option("--triples", probe.triples, "ConceptNet dump or subject/relation/object TSV")
      ->required()
      ->check(CLI::ExistingFile);
  p->add_option("--relations", probe.relations, "Comma separated relation filter");
  p->add_option("--templates", probe.templates, "Template table (JSON)")->check(CLI::ExistingFile);
  p->add_flag("--compare-templates", probe.compare_templates,
              "Also report the mean over every template's best sentence");
  p->add_flag("--multi-token", probe.multi_token, "Score multi-word answers as candidates");
  p->add_option("--split-folds", probe.split_folds, "Write N seeded folds and their rotations")
      ->check(CLI::Range(2, 1000));
  p->callback([&] { action = [&] { return run_probe_command(g, probe); }; });

  OppositeArgs opp;
  auto* o = app.add_subcommand("opposite", "Overlap@K and Miss@K for opposite relation pairs");
  o->add_option("--triples", opp.triples, "ConceptNet dump or TSV")->required()->check(CLI::ExistingFile);
  o->add_option("--pairs", opp.pairs, "Relation pairs, e.g. Synonym/Antonym,Desires/NotDesires");
  o->add_option("--templates", opp.templates, "Template table (JSON)")->check(CLI::ExistingFile);
  o->callback([&] { action = [&] { return run_opposite_command(g, opp); }; });

  FreqArgs freq;
  auto* f = app.add_subcommand("freq", "Corpus co-occurrence counts and hit correlation");
  f->add_option("--corpus", freq.corpus, "Directory of .txt files (or one file)")
      ->required()
      ->check(CLI::ExistingPath);
  f->add_option("--pairs", freq.pairs, "subject<TAB>object list")->check(CLI::ExistingFile);
  f->add_option("--predictions", freq.predictions, "predictions.jsonl written by probe")
      ->check(CLI::ExistingFile);
  f->add_option("--joint-edges", freq.joint_edges, "Joint-count bucket edges, e.g. 0,1,10,100");
  f->add_option("--subject-edges", freq.subject_edges, "Subject-count bucket edges");
  f->add_option("--min-joint", freq.min_joint, "Drop triples below this joint count");
  f->callback([&] { action = [&] { return run_freq_command(g, freq); }; });

  AugmentArgs aug;
  auto* a = app.add_subcommand("augment", "Insert knowledge triples into a QA dataset");
  a->add_option("--dataset", aug.dataset, "SQuAD 2.0 or ReCoRD JSON")->required()->check(CLI::ExistingFile);
  a->add_option("--style", aug.style, "squad or record")->check(CLI::IsMember({"squad", "record"}));
  a->add_option("--triples", aug.triples, "id<TAB>subject<TAB>relation<TAB>object")
      ->required()
      ->check(CLI::ExistingFile);
  a->add_option("--templates", aug.templates, "Template table (JSON)")->check(CLI::ExistingFile);
  a->callback([&] { action = [&] { return run_augment_command(g, aug); }; });

  ScoreRcArgs rc;
  auto* s = app.add_subcommand("score-rc", "EM/F1 and similarity buckets for RC predictions");
  s->add_option("--dataset", rc.dataset, "SQuAD 2.0 or ReCoRD JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--style", rc.style, "squad or record")->check(CLI::IsMember({"squad", "record"}));
  s->add_option("--predictions", rc.predictions, "JSON object id -> answer")
      ->required()
      ->check(CLI::ExistingFile);
  s->add_option("--types", rc.types, "JSON object id -> question types")->check(CLI::ExistingFile);
  s->add_option("--edges", rc.edges, "Similarity bucket edges, e.g. 0,0.2,0.4");
  s->callback([&] { action = [&] { return run_score_rc_command(g, rc); }; });

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Print a probe report as a table and rewrite its CSV");
  r->add_option("input", rep.input, "report.json")->required()->check(CLI::ExistingFile);
  r->callback([&] { action = [&] { return run_report_command(g, rep); }; });

  CLI11_PARSE(app, argc, argv);

  try {
    return action();
  } catch (const lmprobe::ConfigError& e) {
    std::fprintf(stderr, "lmprobe: configuration error: %s\n", e.what());
    return 2;
  } catch (const lmprobe::Error& e) {
    std::fprintf(stderr, "lmprobe: %s\n", e.what());
    return 1;
  }
}
