#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lmprobe/config.hpp"

namespace lmprobe::cli {

struct Global {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string scorer;
  std::string ks;
  std::string out;
  std::string fixture;
  std::string ngram_corpus;
  std::optional<int> threads;
  bool quiet = false;

  // Loads the config file (if any) and applies command line overrides.
  Config resolve() const;
};

struct ProbeArgs {
  std::string triples;
  std::string relations;
  std::string templates;
  bool compare_templates = false;
  bool multi_token = false;
  int split_folds = 0;
};

struct OppositeArgs {
  std::string triples;
  std::string pairs;
  std::string templates;
};

struct FreqArgs {
  std::string corpus;
  std::string pairs;
  std::string predictions;
  std::string joint_edges;
  std::string subject_edges;
  std::optional<std::uint64_t> min_joint;
};

struct AugmentArgs {
  std::string dataset;
  std::string style = "squad";
  std::string triples;
  std::string templates;
};

struct ScoreRcArgs {
  std::string dataset;
  std::string style = "squad";
  std::string predictions;
  std::string types;
  std::string edges;
};

struct ReportArgs {
  std::string input;
};

int run_probe_command(const Global& g, const ProbeArgs& a);
int run_opposite_command(const Global& g, const OppositeArgs& a);
int run_freq_command(const Global& g, const FreqArgs& a);
int run_augment_command(const Global& g, const AugmentArgs& a);
int run_score_rc_command(const Global& g, const ScoreRcArgs& a);
int run_report_command(const Global& g, const ReportArgs& a);

}  // namespace lmprobe::cli
