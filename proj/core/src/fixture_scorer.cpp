#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>

#include "lmprobe/error.hpp"
#include "lmprobe/scorer.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

using nlohmann::json;

namespace {

std::vector<Prediction> parse_predictions(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ParseError(where + ": expected array");
  std::vector<Prediction> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& e = arr[i];
    try {
      out.push_back({e.at("token").get<std::string>(), e.at("logprob").get<double>()});
    } catch (const json::exception& ex) {
      throw ParseError(where + "[" + std::to_string(i) + "]: " + ex.what());
    }
  }
  return out;
}

template <typename V>
const V* lookup(const std::vector<std::pair<std::string, V>>& table,
                const std::string& key) {
  auto it = std::lower_bound(table.begin(), table.end(), key,
                             [](const auto& e, const std::string& k) { return e.first < k; });
  return (it != table.end() && it->first == key) ? &it->second : nullptr;
}

}  // namespace

FixtureScorer FixtureScorer::load(const std::string& path) {
  return parse(read_file(path));
}

FixtureScorer FixtureScorer::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("fixture scorer: ") + e.what());
  }
  FixtureScorer s;
  s.digest_ = fnv1a_hex(json_text);
  std::set<std::string> vocab;

  if (doc.contains("fill")) {
    for (const auto& [prompt, preds] : doc["fill"].items()) {
      auto entries = parse_predictions(preds, "fill." + prompt);
      for (const auto& p : entries) vocab.insert(p.token);
      canonicalize(entries, entries.size());
      s.fills_.emplace_back(collapse_whitespace(prompt), std::move(entries));
    }
  }
  if (doc.contains("perplexity")) {
    for (const auto& [sentence, value] : doc["perplexity"].items()) {
      if (!value.is_number() || value.get<double>() <= 0)
        throw ParseError("perplexity." + sentence + ": expected positive number");
      s.perplexities_.emplace_back(collapse_whitespace(sentence), value.get<double>());
    }
  }
  if (doc.contains("default_perplexity"))
    s.default_perplexity_ = doc["default_perplexity"].get<double>();
  if (doc.contains("default_fill")) {
    auto entries = parse_predictions(doc["default_fill"], "default_fill");
    for (const auto& p : entries) vocab.insert(p.token);
    canonicalize(entries, entries.size());
    s.default_fill_ = std::move(entries);
  }

  s.caps_.mask_anywhere = true;
  s.caps_.mask_token = "[MASK]";
  s.caps_.model_name = "fixture";
  s.caps_.vocab_size = std::max<std::int64_t>(1, static_cast<std::int64_t>(vocab.size()));
  if (doc.contains("capabilities")) {
    const auto& c = doc["capabilities"];
    s.caps_.mask_anywhere = c.value("mask_anywhere", s.caps_.mask_anywhere);
    s.caps_.mask_token = c.value("mask_token", s.caps_.mask_token);
    s.caps_.vocab_size = c.value("vocab_size", s.caps_.vocab_size);
    s.caps_.model_name = c.value("model_name", s.caps_.model_name);
  }
  if (s.caps_.mask_token.empty()) throw ParseError("capabilities.mask_token is empty");

  std::sort(s.fills_.begin(), s.fills_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::sort(s.perplexities_.begin(), s.perplexities_.end());
  return s;
}

RankedPredictions FixtureScorer::score_fill(
    std::string_view prompt, std::size_t top_n,
    const std::optional<std::vector<std::string>>& candidates) const {
  check_fill_request(prompt, caps_.mask_token, top_n);
  const auto key = collapse_whitespace(prompt);
  const auto* recorded = lookup(fills_, key);
  if (!recorded) {
    if (!default_fill_) throw ContractError("fixture has no fill for prompt: " + key);
    recorded = &*default_fill_;
  }
  RankedPredictions out{key, {}};
  if (candidates) {
    std::set<std::string> allowed(candidates->begin(), candidates->end());
    for (const auto& p : *recorded)
      if (allowed.count(p.token)) out.entries.push_back(p);
  } else {
    out.entries = *recorded;
  }
  canonicalize(out.entries, top_n);
  return out;
}

double FixtureScorer::perplexity(std::string_view sentence) const {
  const auto key = collapse_whitespace(sentence);
  if (key.empty()) throw ContractError("perplexity of an empty sentence");
  if (const auto* v = lookup(perplexities_, key)) return *v;
  if (default_perplexity_) return *default_perplexity_;
  throw ContractError("fixture has no perplexity for: " + key);
}

std::string FixtureScorer::identity() const { return "fixture:" + digest_; }

}  // namespace lmprobe
