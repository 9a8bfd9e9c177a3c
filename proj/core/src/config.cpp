#include "lmprobe/config.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "lmprobe/error.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

using nlohmann::json;

namespace {

class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError(name_ + ": expected an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(name_ + ": unknown key '" + it.key() + "'");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (const auto* v = get(key)) {
      try {
        out = v->get<T>();
      } catch (const json::exception&) {
        throw ConfigError(name_ + "." + key + ": wrong type");
      }
    }
  }

  const json* section(const std::string& key) {
    const auto* v = get(key);
    if (v && !v->is_object()) throw ConfigError(name_ + "." + key + ": expected an object");
    return v;
  }

  std::string where(const std::string& key) const { return name_ + "." + key; }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

BucketSpec read_edges(const json& v, const std::string& where) {
  BucketSpec spec;
  try {
    spec.edges = v.get<std::vector<std::uint64_t>>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": expected a list of non-negative integers");
  }
  try {
    spec.validate();
  } catch (const ContractError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return spec;
}

}  // namespace

Config Config::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Config c;
  Section top(doc, "config");
  top.read("seed", c.seed);
  top.read("out", c.out_dir);

  if (const auto* s = top.section("kb-core")) {
    Section sec(*s, "kb-core");
    if (const auto* r = sec.get("relations")) {
      if (!r->is_string()) throw ConfigError("kb-core.relations: expected a string");
      c.relations = RelationSet::parse(r->get<std::string>());
    }
    sec.read("language", c.language);
    sec.read("strict", c.strict);
    sec.read("folds", c.folds);
  }
  if (const auto* s = top.section("prompt-gen")) {
    Section sec(*s, "prompt-gen");
    std::string path;
    sec.read("templates", path);
    if (!path.empty()) c.templates_path = path;
    sec.read("filler", c.filler);
  }
  if (const auto* s = top.section("scorer")) {
    Section sec(*s, "scorer");
    sec.read("spec", c.scorer);
    sec.read("fixture", c.fixture_path);
    sec.read("ngram_corpus", c.ngram_corpus);
    sec.read("ngram_order", c.ngram_order);
    sec.read("max_attempts", c.remote.max_attempts);
    sec.read("max_in_flight", c.remote.max_in_flight);
    int backoff = static_cast<int>(c.remote.initial_backoff.count());
    int timeout = static_cast<int>(c.remote.timeout.count());
    sec.read("backoff_ms", backoff);
    sec.read("timeout_s", timeout);
    c.remote.initial_backoff = std::chrono::milliseconds(backoff);
    c.remote.timeout = std::chrono::seconds(timeout);
  }
  if (const auto* s = top.section("probe-metrics")) {
    Section sec(*s, "probe-metrics");
    if (const auto* ks = sec.get("ks")) {
      if (ks->is_string()) {
        c.ks = parse_ks(ks->get<std::string>());
      } else {
        std::string csv;
        try {
          for (const auto& k : *ks) csv += std::to_string(k.get<long long>()) + ",";
        } catch (const json::exception&) {
          throw ConfigError("probe-metrics.ks: expected a list of integers");
        }
        c.ks = parse_ks(csv);
      }
    }
    sec.read("top_n", c.top_n);
    sec.read("threads", c.threads);
    sec.read("compare_templates", c.compare_templates);
    sec.read("multi_token", c.multi_token);
    sec.read("top_words", c.top_words);
    sec.read("top_words_k", c.top_words_k);
    std::string pairs;
    sec.read("opposite_pairs", pairs);
    if (!pairs.empty()) c.opposite_pairs = parse_relation_pairs(pairs);
  }
  if (const auto* s = top.section("corpus-freq")) {
    Section sec(*s, "corpus-freq");
    sec.read("threads", c.scan_threads);
    std::size_t mb = c.shard_bytes >> 20;
    sec.read("shard_mb", mb);
    if (mb == 0) throw ConfigError("corpus-freq.shard_mb must be at least 1");
    c.shard_bytes = mb << 20;
    if (const auto* v = sec.get("joint_edges")) c.joint_edges = read_edges(*v, sec.where("joint_edges"));
    if (const auto* v = sec.get("subject_edges"))
      c.subject_edges = read_edges(*v, sec.where("subject_edges"));
    sec.read("min_joint", c.min_joint);
  }
  if (const auto* s = top.section("qa-augment")) {
    Section sec(*s, "qa-augment");
    sec.read("similarity_edges", c.similarity_edges);
    for (std::size_t i = 1; i < c.similarity_edges.size(); ++i)
      if (!(c.similarity_edges[i] > c.similarity_edges[i - 1]))
        throw ConfigError("qa-augment.similarity_edges must be strictly increasing");
    if (c.similarity_edges.empty()) throw ConfigError("qa-augment.similarity_edges is empty");
  }
  if (const auto* s = top.section("report")) {
    Section sec(*s, "report");
    sec.read("predictions", c.write_predictions);
  }

  if (c.folds < 2) throw ConfigError("kb-core.folds must be at least 2");
  if (c.threads < 1 || c.scan_threads < 1) throw ConfigError("thread counts must be at least 1");
  if (c.ngram_order != 1 && c.ngram_order != 2) throw ConfigError("scorer.ngram_order must be 1 or 2");
  if (c.remote.max_attempts < 1 || c.remote.max_in_flight < 1)
    throw ConfigError("scorer.max_attempts and scorer.max_in_flight must be positive");
  return c;
}

Config Config::load(const std::string& path) { return parse(read_file(path)); }

std::string Config::to_json() const {
  std::vector<std::string> rels;
  for (auto r : relations.members()) rels.emplace_back(relation_name(r));
  std::string pairs;
  for (const auto& [a, b] : opposite_pairs) {
    if (!pairs.empty()) pairs += ",";
    pairs += std::string(relation_name(a)) + "/" + std::string(relation_name(b));
  }
  json doc = {
      {"corpus-freq",
       {{"joint_edges", joint_edges.edges},
        {"min_joint", min_joint},
        {"shard_mb", shard_bytes >> 20},
        {"subject_edges", subject_edges.edges}}},
      {"kb-core",
       {{"folds", folds}, {"language", language}, {"relations", join(rels, ",")}, {"strict", strict}}},
      {"probe-metrics",
       {{"compare_templates", compare_templates},
        {"ks", ks},
        {"multi_token", multi_token},
        {"opposite_pairs", pairs},
        {"top_n", top_n},
        {"top_words", top_words},
        {"top_words_k", top_words_k}}},
      {"prompt-gen", {{"filler", filler}, {"templates", templates_path ? json(*templates_path) : json(nullptr)}}},
      {"qa-augment", {{"similarity_edges", similarity_edges}}},
      {"scorer", {{"ngram_order", ngram_order}, {"spec", scorer}}},
      {"seed", seed}};
  return doc.dump();
}

ProbeOptions Config::probe_options() const {
  ProbeOptions o;
  o.ks = ks;
  o.top_n = top_n;
  o.threads = threads;
  o.compare_templates = compare_templates;
  o.multi_token = multi_token;
  o.top_words = top_words;
  o.top_words_k = top_words_k;
  o.prompt.filler = filler;
  return o;
}

ScanOptions Config::scan_options() const { return {scan_threads, shard_bytes}; }

ScorerSpec Config::scorer_spec() const {
  ScorerSpec spec;
  spec.ngram_order = ngram_order;
  spec.remote = remote;
  if (scorer == "builtin:fixture") {
    spec.kind = "fixture";
    spec.location = fixture_path;
  } else if (scorer == "builtin:ngram") {
    spec.kind = "ngram";
    spec.location = ngram_corpus;
  } else if (scorer.rfind("http://", 0) == 0 || scorer.rfind("https://", 0) == 0) {
    spec.kind = "remote";
    spec.location = scorer;
  } else {
    throw ConfigError("unknown scorer '" + scorer + "' (expected a URL, builtin:fixture or builtin:ngram)");
  }
  return spec;
}

}  // namespace lmprobe
