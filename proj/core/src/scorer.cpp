#include "lmprobe/scorer.hpp"

#include <algorithm>
#include <unordered_set>

#include "lmprobe/error.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

std::vector<std::string> RankedPredictions::top_tokens(std::size_t k) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < entries.size() && i < k; ++i)
    out.push_back(entries[i].token);
  return out;
}

void canonicalize(std::vector<Prediction>& entries, std::size_t top_n) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Prediction& a, const Prediction& b) {
                     if (a.logprob != b.logprob) return a.logprob > b.logprob;
                     return a.token < b.token;
                   });
  std::unordered_set<std::string> seen;
  std::vector<Prediction> kept;
  kept.reserve(std::min(entries.size(), top_n));
  for (auto& p : entries) {
    if (kept.size() == top_n) break;
    if (seen.insert(p.token).second) kept.push_back(std::move(p));
  }
  entries = std::move(kept);
}

void check_fill_request(std::string_view prompt, std::string_view mask,
                        std::size_t top_n) {
  if (top_n == 0) throw ContractError("top_n must be at least 1");
  if (count_occurrences(prompt, mask) != 1)
    throw ContractError("prompt must contain the mask token " +
                        std::string(mask) + " exactly once: " +
                        std::string(prompt));
}

std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec) {
  if (spec.kind == "fixture") {
    if (spec.location.empty())
      throw ConfigError("builtin:fixture needs a fixture file");
    return std::make_unique<FixtureScorer>(FixtureScorer::load(spec.location));
  }
  if (spec.kind == "ngram") {
    if (spec.location.empty())
      throw ConfigError("builtin:ngram needs a training corpus");
    NGramOptions opts;
    opts.order = spec.ngram_order;
    return std::make_unique<NGramScorer>(NGramScorer::train_file(spec.location, opts));
  }
  if (spec.kind == "remote") {
    if (spec.location.empty()) throw ConfigError("remote scorer needs a URL");
    return std::make_unique<RemoteScorer>(spec.location, spec.remote);
  }
  throw ConfigError("unknown scorer kind: " + spec.kind);
}

}  // namespace lmprobe
