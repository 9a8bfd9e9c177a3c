#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmprobe/corpus.hpp"
#include "lmprobe/kb.hpp"
#include "lmprobe/probe.hpp"
#include "lmprobe/qa.hpp"
#include "lmprobe/scorer.hpp"

namespace lmprobe {

// Run configuration. The JSON file has one object per module:
//
//   {"seed": 7, "out": "run1",
//    "kb-core": {"relations": "MadeOf,IsA", "language": "en", "strict": false, "folds": 3},
//    "prompt-gen": {"templates": "t.json", "filler": "thing"},
//    "scorer": {"spec": "builtin:ngram", "fixture": "f.json", "ngram_corpus": "c.txt",
//               "ngram_order": 2, "max_attempts": 3, "backoff_ms": 100,
//               "timeout_s": 60, "max_in_flight": 8},
//    "probe-metrics": {"ks": [1, 10, 100], "top_n": 100, "threads": 4,
//                      "compare_templates": false, "multi_token": false,
//                      "top_words": 10, "top_words_k": 10,
//                      "opposite_pairs": "Synonym/Antonym"},
//    "corpus-freq": {"threads": 4, "shard_mb": 16, "joint_edges": [0, 1, 10],
//                    "subject_edges": [0, 100], "min_joint": 0},
//    "qa-augment": {"similarity_edges": [0.0, 0.2, 0.4]},
//    "report": {"predictions": true}}
//
// Every key is optional; unknown keys are rejected.
struct Config {
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  RelationSet relations = RelationSet::all();
  std::string language = "en";
  bool strict = false;
  int folds = 3;

  std::optional<std::string> templates_path;
  std::string filler = "thing";

  std::string scorer = "builtin:fixture";
  std::string fixture_path;
  std::string ngram_corpus;
  int ngram_order = 2;
  RemoteOptions remote;

  std::vector<std::size_t> ks{1, 10, 100};
  std::size_t top_n = 0;
  int threads = 1;
  bool compare_templates = false;
  bool multi_token = false;
  std::size_t top_words = 10;
  std::size_t top_words_k = 10;
  std::vector<RelationPair> opposite_pairs = default_opposite_pairs();

  int scan_threads = 1;
  std::size_t shard_bytes = std::size_t{16} << 20;
  BucketSpec joint_edges = BucketSpec::log_decades();
  BucketSpec subject_edges = BucketSpec::log_decades();
  std::uint64_t min_joint = 0;

  std::vector<double> similarity_edges = default_similarity_edges();

  bool write_predictions = true;

  static Config parse(std::string_view json_text);
  static Config load(const std::string& path);

  // Canonical JSON snapshot (sorted keys) recorded in run manifests.
  std::string to_json() const;

  ProbeOptions probe_options() const;
  ScanOptions scan_options() const;
  // Resolves "builtin:fixture", "builtin:ngram" or a URL into a ScorerSpec.
  ScorerSpec scorer_spec() const;
};

}  // namespace lmprobe
