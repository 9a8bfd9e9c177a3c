#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmprobe/kb.hpp"
#include "lmprobe/metrics.hpp"
#include "lmprobe/prompt.hpp"
#include "lmprobe/scorer.hpp"
#include "lmprobe/templates.hpp"

namespace lmprobe {

struct ProbeOptions {
  std::vector<std::size_t> ks{1, 10, 100};
  std::size_t top_n = 0;  // predictions requested per prompt; 0 means max(ks)
  int threads = 1;
  // Also score every template's best variant and report the per-query mean.
  bool compare_templates = false;
  // Score multi-word answers by restricting the fill to them and merge the
  // result into the ranking.
  bool multi_token = false;
  std::size_t top_words = 10;    // entries in the repeated-word table
  std::size_t top_words_k = 10;  // prediction depth inspected for that table
  PromptOptions prompt;
};

struct ProbeRecord {
  MaskedPrompt prompt;
  QueryResult result;
  // Per usable template (compare_templates only).
  std::vector<std::map<std::size_t, double>> template_hits;
};

struct ProbeRun {
  std::vector<ProbeRecord> records;  // input order
  AggregateReport aggregate;
  std::optional<AggregateReport> template_average;
  std::vector<std::pair<std::string, double>> top_words;
  std::map<Relation, std::vector<std::pair<std::string, double>>> top_words_by_relation;
  std::size_t multi_token_answers = 0;
};

// Throws ContractError on an empty query set or invalid K values.
ProbeRun run_probe(std::span<const ProbeQuery> queries, const TemplateSet& templates,
                   const Scorer& scorer, const ProbeOptions& options = {});

struct OppositeRecord {
  OppositeProbe probe;
  MaskedPrompt prompt_pos;
  MaskedPrompt prompt_neg;
  RankedPredictions predictions_pos;
  RankedPredictions predictions_neg;
  std::map<std::size_t, double> overlap;
  std::map<std::size_t, double> miss_pos;  // pos predictions graded by neg answers
  std::map<std::size_t, double> miss_neg;  // neg predictions graded by pos answers
};

struct OppositeSummary {
  Relation relation_pos{};
  Relation relation_neg{};
  std::size_t subjects = 0;
  std::map<std::size_t, Summary> overlap;
  std::map<std::size_t, Summary> miss_pos;
  std::map<std::size_t, Summary> miss_neg;
};

struct OppositeRun {
  std::vector<std::size_t> ks;
  std::vector<OppositeRecord> records;
  std::vector<OppositeSummary> pairs;  // order of first appearance
};

OppositeRun run_opposite(std::span<const OppositeProbe> probes, const TemplateSet& templates,
                         const Scorer& scorer, const ProbeOptions& options = {});

// One JSON object per line: subject, relation, prompt, answers, predictions, hits.
std::string format_predictions_jsonl(std::span<const ProbeRecord> records);

// Parses "1,10,100"; throws ConfigError unless every K is a positive integer.
std::vector<std::size_t> parse_ks(std::string_view csv);

}  // namespace lmprobe
