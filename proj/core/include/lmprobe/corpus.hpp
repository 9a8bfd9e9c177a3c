#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lmprobe/kb.hpp"

namespace lmprobe {

// Aho-Corasick automaton over lowercase byte strings. A phrase matches only
// where it is flanked by non-letters or the edges of the scanned text.
class PhraseMatcher {
 public:
  struct Match {
    std::uint32_t pattern;
    std::size_t begin;
    std::size_t end;
  };

  // Phrases are lowercased and whitespace-collapsed; duplicates share an id.
  // Throws ContractError on an empty set or an empty phrase.
  static PhraseMatcher compile(std::span<const std::string> phrases);

  std::size_t pattern_count() const { return patterns_.size(); }
  const std::string& pattern(std::size_t id) const { return patterns_[id]; }
  std::optional<std::uint32_t> id_of(std::string_view phrase) const;

  // Appends every word-bounded match in `text` (already lowercase).
  void find_all(std::string_view text, std::vector<Match>& out) const;

  std::size_t state_count() const { return nodes_.size(); }

 private:
  friend class CooccurrenceScanner;

  static constexpr std::uint32_t kNone = 0xffffffffu;
  struct Node {
    std::uint32_t fail = 0;
    std::uint32_t output = kNone;  // nearest node on the fail chain with a pattern
    std::uint32_t pattern = kNone;
    std::uint32_t edge_begin = 0;
    std::uint32_t edge_count = 0;
  };

  std::uint32_t step(std::uint32_t state, unsigned char c) const;
  std::uint32_t edge(std::uint32_t state, unsigned char c) const;

  std::vector<Node> nodes_;
  std::vector<unsigned char> edge_bytes_;
  std::vector<std::uint32_t> edge_targets_;
  std::uint32_t root_next_[256] = {};
  std::vector<std::string> patterns_;
  std::vector<std::uint32_t> pattern_length_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

inline PhraseMatcher compile_patterns(std::span<const std::string> phrases) {
  return PhraseMatcher::compile(phrases);
}

struct PairFrequency {
  std::string subject;
  std::string object;
  std::uint64_t subject_count = 0;  // occurrences
  std::uint64_t object_count = 0;   // occurrences
  std::uint64_t joint_count = 0;    // sentences containing both

  bool operator==(const PairFrequency&) const = default;
};

using PhrasePair = std::pair<std::string, std::string>;

struct ScanOptions {
  int threads = 1;
  std::size_t shard_bytes = std::size_t{16} << 20;
};

// Sentences end at . ! ? and newline. Counting is case-insensitive and
// surface-exact. Results follow the order of `pairs`.
std::vector<PairFrequency> scan_corpus(std::span<const std::string> files,
                                       const PhraseMatcher& matcher,
                                       std::span<const PhrasePair> pairs,
                                       const ScanOptions& options = {});
std::vector<PairFrequency> scan_corpus(std::span<const std::string> files,
                                       std::span<const PhrasePair> pairs,
                                       const ScanOptions& options = {});
std::vector<PairFrequency> scan_text(std::string_view text,
                                     std::span<const PhrasePair> pairs);

// Sorted list of *.txt files below `dir` (or `dir` itself when it is a file).
std::vector<std::string> list_corpus_files(const std::string& dir);

// Two-column TSV of subject/object phrases.
std::vector<PhrasePair> read_pair_list(const std::string& path);

std::string format_pair_frequency_tsv(std::span<const PairFrequency> rows);

// Bucket lower edges; the first is 0, the last bucket is unbounded.
struct BucketSpec {
  std::vector<std::uint64_t> edges;

  // {0}, [1,10), [10,100), [100,1000), [1000,inf)
  static BucketSpec log_decades();
  static BucketSpec parse(std::string_view csv);
  void validate() const;
  std::size_t index_of(std::uint64_t value) const;
  std::size_t size() const { return edges.size(); }
};

struct HistogramBucket {
  std::uint64_t lower = 0;
  std::optional<std::uint64_t> upper;  // exclusive; nullopt for the last bucket
  std::size_t count = 0;
};

std::vector<HistogramBucket> bucket_joint(std::span<const PairFrequency> pairs,
                                          const BucketSpec& spec = BucketSpec::log_decades());

// One probed triple with its ranked predictions.
struct ProbeHit {
  std::string subject;
  Relation relation{};
  std::string object;
  std::vector<std::string> predictions;  // ranked tokens
  std::size_t answer_count = 1;          // true objects of (subject, relation)
};

enum class HitMode { Top100, TopAnswerCount };

struct CorrelationCell {
  std::size_t population = 0;
  std::size_t hits = 0;

  std::optional<double> proportion() const;
};

struct Correlation {
  HitMode mode = HitMode::Top100;
  std::uint64_t min_joint = 0;
  std::vector<HistogramBucket> joint_buckets;    // counts = population
  std::vector<HistogramBucket> subject_buckets;  // counts = population
  std::vector<CorrelationCell> by_joint;
  std::vector<std::vector<CorrelationCell>> heatmap;  // [joint bucket][subject bucket]
  std::vector<ProbeHit> residue;                      // no matching PairFrequency
};

// A triple is a hit when its object is within the top 100 predictions
// (Top100) or within the top `answer_count` predictions (TopAnswerCount).
// Triples whose joint count is below `min_joint` are left out.
Correlation correlate_hits(std::span<const PairFrequency> pairs,
                           std::span<const ProbeHit> hits, HitMode mode,
                           const BucketSpec& joint_edges = BucketSpec::log_decades(),
                           const BucketSpec& subject_edges = BucketSpec::log_decades(),
                           std::uint64_t min_joint = 0);

}  // namespace lmprobe
