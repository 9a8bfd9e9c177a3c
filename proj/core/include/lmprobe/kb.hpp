#pragma once

#include <array>
#include <bitset>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lmprobe {

// The 32 ConceptNet relations covered by the default template table.
enum class Relation : std::uint8_t {
  RelatedTo,
  HasContext,
  IsA,
  DerivedFrom,
  Synonym,
  FormOf,
  SimilarTo,
  EtymologicallyRelatedTo,
  AtLocation,
  MannerOf,
  Antonym,
  HasProperty,
  PartOf,
  UsedFor,
  DistinctFrom,
  HasPrerequisite,
  HasSubevent,
  Causes,
  HasA,
  InstanceOf,
  CapableOf,
  MotivatedByGoal,
  MadeOf,
  Entails,
  Desires,
  NotHasProperty,
  CreatedBy,
  NotDesires,
  DefinedAs,
  NotCapableOf,
  LocatedNear,
  EtymologicallyDerivedFrom,
};

inline constexpr std::size_t kRelationCount = 32;

std::string_view relation_name(Relation r);

// Accepts the CamelCase name ("MadeOf") or a ConceptNet URI ("/r/MadeOf").
std::optional<Relation> parse_relation(std::string_view text);

const std::array<Relation, kRelationCount>& all_relations();

class RelationSet {
 public:
  RelationSet() = default;
  RelationSet(std::initializer_list<Relation> rs) {
    for (auto r : rs) insert(r);
  }
  static RelationSet all();
  // Comma separated relation names; throws ConfigError on unknown names.
  static RelationSet parse(std::string_view csv);

  void insert(Relation r) { bits_.set(static_cast<std::size_t>(r)); }
  bool contains(Relation r) const { return bits_.test(static_cast<std::size_t>(r)); }
  std::size_t size() const { return bits_.count(); }
  bool empty() const { return bits_.none(); }
  std::vector<Relation> members() const;

 private:
  std::bitset<kRelationCount> bits_;
};

struct Triple {
  std::string subject;
  Relation relation{};
  std::string object;

  auto operator<=>(const Triple&) const = default;
  bool operator==(const Triple&) const = default;
};

// All true objects of one (subject, relation) pair.
struct ProbeQuery {
  std::string subject;
  Relation relation{};
  std::vector<std::string> answers;  // sorted, unique, non-empty
};

struct OppositeProbe {
  std::string subject;
  Relation relation_pos{};
  Relation relation_neg{};
  std::vector<std::string> answers_pos;
  std::vector<std::string> answers_neg;
};

using RelationPair = std::pair<Relation, Relation>;

// Synonym/Antonym, HasProperty/NotHasProperty, Desires/NotDesires,
// CapableOf/NotCapableOf.
std::vector<RelationPair> default_opposite_pairs();

// "Synonym/Antonym,Desires/NotDesires"; throws ConfigError on unknown names.
std::vector<RelationPair> parse_relation_pairs(std::string_view text);

struct IngestOptions {
  RelationSet relations = RelationSet::all();
  std::string language = "en";
  bool strict = false;  // malformed rows become ParseError instead of warnings
};

struct IngestResult {
  std::vector<Triple> triples;  // deduplicated, first-seen order
  std::size_t malformed_rows = 0;
  std::size_t filtered_rows = 0;
  std::size_t duplicate_rows = 0;
  std::vector<std::string> warnings;  // first few malformed rows, with line numbers
};

// Reads ConceptNet assertion rows (uri, relation, start, end, metadata) or the
// simplified 3-column `subject<TAB>relation<TAB>object` form.
IngestResult ingest_conceptnet(const std::string& path,
                               const IngestOptions& options = {});
IngestResult ingest_conceptnet_text(std::string_view text,
                                    const IngestOptions& options = {});

// One query per distinct (subject, relation), ordered by (relation, subject).
std::vector<ProbeQuery> group_queries(std::span<const Triple> triples);

std::vector<OppositeProbe> build_opposite_probes(
    std::span<const Triple> triples, std::span<const RelationPair> pairs);
std::vector<OppositeProbe> build_opposite_probes(
    std::span<const Triple> triples,
    std::span<const std::pair<std::string, std::string>> pairs);

struct FoldRotation {
  std::vector<int> train;
  std::optional<int> validation;  // absent when n_folds == 2
  int test = 0;
};

class FoldAssignment {
 public:
  FoldAssignment(int n_folds, std::uint64_t seed, std::vector<Triple> triples,
                 std::vector<int> folds);

  int n_folds() const { return n_folds_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Triple>& triples() const { return triples_; }
  const std::vector<int>& folds() const { return folds_; }

  std::optional<int> fold_of(const Triple& t) const;
  std::vector<std::size_t> fold_sizes() const;
  std::vector<Triple> fold(int index) const;

  // Rotation r trains on fold r, validates on r+1 and tests on r-1 (mod n):
  // for three folds this is (0,1,2), (1,2,0), (2,0,1).
  std::vector<FoldRotation> rotations() const;

 private:
  int n_folds_;
  std::uint64_t seed_;
  std::vector<Triple> triples_;  // canonical (sorted) order
  std::vector<int> folds_;
};

FoldAssignment split_folds(std::span<const Triple> triples, int n_folds,
                           std::uint64_t seed);

std::string format_triple_tsv(const Triple& t);

}  // namespace lmprobe
