#include "lmprobe/kb.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

#include "lmprobe/error.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

namespace {

constexpr std::array<std::string_view, kRelationCount> kNames = {
    "RelatedTo",       "HasContext",     "IsA",
    "DerivedFrom",     "Synonym",        "FormOf",
    "SimilarTo",       "EtymologicallyRelatedTo",
    "AtLocation",      "MannerOf",       "Antonym",
    "HasProperty",     "PartOf",         "UsedFor",
    "DistinctFrom",    "HasPrerequisite", "HasSubevent",
    "Causes",          "HasA",           "InstanceOf",
    "CapableOf",       "MotivatedByGoal", "MadeOf",
    "Entails",         "Desires",        "NotHasProperty",
    "CreatedBy",       "NotDesires",     "DefinedAs",
    "NotCapableOf",    "LocatedNear",    "EtymologicallyDerivedFrom",
};

constexpr std::size_t kMaxStoredWarnings = 20;

// "/c/en/ice_cream/n" -> ("en", "ice cream"); nullopt when not a concept URI.
struct Concept {
  std::string language;
  std::string term;
};

std::optional<Concept> parse_concept(std::string_view uri) {
  if (!uri.starts_with("/c/")) return std::nullopt;
  auto parts = split(uri.substr(3), '/');
  if (parts.size() < 2 || parts[0].empty() || parts[1].empty())
    return std::nullopt;
  return Concept{parts[0], normalize_phrase(replace_all(parts[1], "_", " "))};
}

std::string normalize_surface(std::string_view s) {
  return normalize_phrase(replace_all(s, "_", " "));
}

}  // namespace

std::string_view relation_name(Relation r) {
  return kNames[static_cast<std::size_t>(r)];
}

std::optional<Relation> parse_relation(std::string_view text) {
  if (text.starts_with("/r/")) {
    text.remove_prefix(3);
    while (text.ends_with('/')) text.remove_suffix(1);
  }
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == text) return static_cast<Relation>(i);
  return std::nullopt;
}

const std::array<Relation, kRelationCount>& all_relations() {
  static const auto table = [] {
    std::array<Relation, kRelationCount> a{};
    for (std::size_t i = 0; i < kRelationCount; ++i)
      a[i] = static_cast<Relation>(i);
    return a;
  }();
  return table;
}

RelationSet RelationSet::all() {
  RelationSet s;
  s.bits_.set();
  return s;
}

RelationSet RelationSet::parse(std::string_view csv) {
  RelationSet s;
  for (const auto& raw : split(csv, ',')) {
    auto name = collapse_whitespace(raw);
    if (name.empty()) continue;
    auto r = parse_relation(name);
    if (!r) throw ConfigError("unknown relation: " + name);
    s.insert(*r);
  }
  return s;
}

std::vector<Relation> RelationSet::members() const {
  std::vector<Relation> out;
  for (auto r : all_relations())
    if (contains(r)) out.push_back(r);
  return out;
}

std::vector<RelationPair> default_opposite_pairs() {
  return {{Relation::Synonym, Relation::Antonym},
          {Relation::HasProperty, Relation::NotHasProperty},
          {Relation::Desires, Relation::NotDesires},
          {Relation::CapableOf, Relation::NotCapableOf}};
}

std::vector<RelationPair> parse_relation_pairs(std::string_view text) {
  std::vector<RelationPair> out;
  for (const auto& raw : split(text, ',')) {
    auto item = collapse_whitespace(raw);
    if (item.empty()) continue;
    auto halves = split(item, '/');
    if (halves.size() != 2)
      throw ConfigError("relation pair must look like A/B: " + item);
    auto a = parse_relation(collapse_whitespace(halves[0]));
    auto b = parse_relation(collapse_whitespace(halves[1]));
    if (!a || !b) throw ConfigError("unknown relation in pair: " + item);
    out.emplace_back(*a, *b);
  }
  return out;
}

IngestResult ingest_conceptnet_text(std::string_view text,
                                    const IngestOptions& options) {
  IngestResult result;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;

  auto malformed = [&](std::string_view why) {
    std::string msg =
        "line " + std::to_string(line_no) + ": " + std::string(why);
    if (options.strict) throw ParseError(msg);
    ++result.malformed_rows;
    if (result.warnings.size() < kMaxStoredWarnings)
      result.warnings.push_back(std::move(msg));
  };

  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }

    auto fields = split(line, '\t');
    std::optional<Triple> triple;
    if (fields.size() == 3 && fields[0].starts_with("/a/")) {
      malformed("truncated ConceptNet assertion row");
    } else if (fields.size() == 3) {
      auto rel = parse_relation(collapse_whitespace(fields[1]));
      auto subject = normalize_surface(fields[0]);
      auto object = normalize_surface(fields[2]);
      if (subject.empty() || object.empty()) {
        malformed("empty subject or object");
      } else if (!rel || !options.relations.contains(*rel)) {
        ++result.filtered_rows;
      } else {
        triple = Triple{subject, *rel, object};
      }
    } else if (fields.size() >= 4) {
      const auto& rel_uri = fields[1];
      auto subj = parse_concept(fields[2]);
      auto obj = parse_concept(fields[3]);
      if (!rel_uri.starts_with("/r/") || !subj || !obj ||
          subj->term.empty() || obj->term.empty()) {
        malformed("not a ConceptNet assertion row");
      } else {
        auto rel = parse_relation(rel_uri);
        if (!rel || !options.relations.contains(*rel) ||
            subj->language != options.language ||
            obj->language != options.language) {
          ++result.filtered_rows;
        } else {
          triple = Triple{subj->term, *rel, obj->term};
        }
      }
    } else {
      malformed("expected 3 or at least 4 tab-separated fields");
    }

    if (triple) {
      auto key = format_triple_tsv(*triple);
      if (seen.insert(std::move(key)).second)
        result.triples.push_back(std::move(*triple));
      else
        ++result.duplicate_rows;
    }
    if (end == text.size()) break;
  }
  return result;
}

IngestResult ingest_conceptnet(const std::string& path,
                               const IngestOptions& options) {
  return ingest_conceptnet_text(read_file(path), options);
}

std::vector<ProbeQuery> group_queries(std::span<const Triple> triples) {
  std::map<std::pair<Relation, std::string>, std::set<std::string>> grouped;
  for (const auto& t : triples) grouped[{t.relation, t.subject}].insert(t.object);

  std::vector<ProbeQuery> out;
  out.reserve(grouped.size());
  for (auto& [key, answers] : grouped)
    out.push_back({key.second, key.first, {answers.begin(), answers.end()}});
  return out;
}

std::vector<OppositeProbe> build_opposite_probes(
    std::span<const Triple> triples, std::span<const RelationPair> pairs) {
  std::map<std::pair<Relation, std::string>, std::set<std::string>> by_key;
  for (const auto& t : triples) by_key[{t.relation, t.subject}].insert(t.object);

  std::vector<OppositeProbe> out;
  for (const auto& [pos, neg] : pairs) {
    for (const auto& [key, answers_pos] : by_key) {
      if (key.first != pos) continue;
      auto it = by_key.find({neg, key.second});
      if (it == by_key.end() || it->second.empty() || answers_pos.empty())
        continue;
      out.push_back({key.second,
                     pos,
                     neg,
                     {answers_pos.begin(), answers_pos.end()},
                     {it->second.begin(), it->second.end()}});
    }
  }
  return out;
}

std::vector<OppositeProbe> build_opposite_probes(
    std::span<const Triple> triples,
    std::span<const std::pair<std::string, std::string>> pairs) {
  std::vector<RelationPair> parsed;
  for (const auto& [a, b] : pairs) {
    auto ra = parse_relation(a);
    auto rb = parse_relation(b);
    if (!ra || !rb)
      throw ConfigError("unknown relation in pair table: " + a + "/" + b);
    parsed.emplace_back(*ra, *rb);
  }
  return build_opposite_probes(triples, parsed);
}

FoldAssignment::FoldAssignment(int n_folds, std::uint64_t seed,
                               std::vector<Triple> triples,
                               std::vector<int> folds)
    : n_folds_(n_folds),
      seed_(seed),
      triples_(std::move(triples)),
      folds_(std::move(folds)) {}

std::optional<int> FoldAssignment::fold_of(const Triple& t) const {
  auto it = std::lower_bound(triples_.begin(), triples_.end(), t);
  if (it == triples_.end() || *it != t) return std::nullopt;
  return folds_[static_cast<std::size_t>(it - triples_.begin())];
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(n_folds_), 0);
  for (int f : folds_) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

std::vector<Triple> FoldAssignment::fold(int index) const {
  std::vector<Triple> out;
  for (std::size_t i = 0; i < triples_.size(); ++i)
    if (folds_[i] == index) out.push_back(triples_[i]);
  return out;
}

std::vector<FoldRotation> FoldAssignment::rotations() const {
  std::vector<FoldRotation> out;
  const int n = n_folds_;
  for (int r = 0; r < n; ++r) {
    FoldRotation rot;
    rot.test = (r + n - 1) % n;
    if (n >= 3) rot.validation = (r + 1) % n;
    for (int f = 0; f < n; ++f)
      if (f != rot.test && (!rot.validation || f != *rot.validation))
        rot.train.push_back(f);
    out.push_back(std::move(rot));
  }
  return out;
}

FoldAssignment split_folds(std::span<const Triple> triples, int n_folds,
                           std::uint64_t seed) {
  if (n_folds < 2) throw ContractError("n_folds must be at least 2");
  std::vector<Triple> canonical(triples.begin(), triples.end());
  std::sort(canonical.begin(), canonical.end());
  canonical.erase(std::unique(canonical.begin(), canonical.end()),
                  canonical.end());
  if (static_cast<std::size_t>(n_folds) > canonical.size())
    throw ContractError("more folds than triples");

  // Explicit Fisher-Yates over mt19937_64 so the permutation does not depend
  // on the standard library's distribution implementation.
  std::vector<std::size_t> order(canonical.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  std::vector<int> folds(canonical.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    folds[order[k]] = static_cast<int>(k % static_cast<std::size_t>(n_folds));
  return FoldAssignment(n_folds, seed, std::move(canonical), std::move(folds));
}

std::string format_triple_tsv(const Triple& t) {
  std::string out = t.subject;
  out += '\t';
  out += relation_name(t.relation);
  out += '\t';
  out += t.object;
  return out;
}

}  // namespace lmprobe
