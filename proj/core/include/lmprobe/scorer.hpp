#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lmprobe {

struct ScorerCapabilities {
  bool mask_anywhere = true;
  std::string mask_token = "[MASK]";
  std::int64_t vocab_size = 1;
  std::string model_name;
};

struct Prediction {
  std::string token;
  double logprob = 0.0;

  bool operator==(const Prediction&) const = default;
};

struct RankedPredictions {
  std::string prompt;
  std::vector<Prediction> entries;  // logprob descending, unique tokens

  std::vector<std::string> top_tokens(std::size_t k) const;
};

// Sorts by logprob descending (ties by token), drops repeated tokens and
// truncates to `top_n`.
void canonicalize(std::vector<Prediction>& entries, std::size_t top_n);

// Language-model scoring protocol. Implementations are immutable after
// construction and safe to call concurrently.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual ScorerCapabilities capabilities() const = 0;

  // Ranks fillers for the single mask slot in `prompt`. When `candidates` is
  // given the ranking is restricted to that set.
  virtual RankedPredictions score_fill(
      std::string_view prompt, std::size_t top_n,
      const std::optional<std::vector<std::string>>& candidates = std::nullopt) const = 0;

  // exp(mean negative token log-likelihood).
  virtual double perplexity(std::string_view sentence) const = 0;

  // Short identity string recorded in run manifests.
  virtual std::string identity() const = 0;
};

// Throws ContractError unless `prompt` contains `mask` exactly once and
// top_n >= 1.
void check_fill_request(std::string_view prompt, std::string_view mask,
                        std::size_t top_n);

// Table playback scorer backed by a JSON file:
//   {"capabilities": {...}, "fill": {prompt: [{"token","logprob"}...]},
//    "perplexity": {sentence: value}, "default_perplexity": x,
//    "default_fill": [...]}
class FixtureScorer final : public Scorer {
 public:
  static FixtureScorer load(const std::string& path);
  static FixtureScorer parse(std::string_view json_text);

  ScorerCapabilities capabilities() const override { return caps_; }
  RankedPredictions score_fill(
      std::string_view prompt, std::size_t top_n,
      const std::optional<std::vector<std::string>>& candidates = std::nullopt) const override;
  double perplexity(std::string_view sentence) const override;
  std::string identity() const override;

 private:
  ScorerCapabilities caps_;
  std::vector<std::pair<std::string, std::vector<Prediction>>> fills_;  // sorted by key
  std::vector<std::pair<std::string, double>> perplexities_;            // sorted by key
  std::optional<double> default_perplexity_;
  std::optional<std::vector<Prediction>> default_fill_;
  std::string digest_;
};

struct NGramOptions {
  int order = 2;  // 1 (unigram) or 2 (bigram)
  std::string mask_token = "[MASK]";
};

// Word n-gram model with add-one smoothing. Sentences end at . ! ? and
// newlines; tokens are lowercase runs of letters, digits, apostrophes and
// hyphens; unseen words map to <unk>.
class NGramScorer final : public Scorer {
 public:
  static NGramScorer train(std::string_view corpus, NGramOptions options = {});
  static NGramScorer train_file(const std::string& path, NGramOptions options = {});
  // Untrained model over an explicit vocabulary: uniform when order == 1.
  static NGramScorer uniform(const std::vector<std::string>& vocabulary,
                             NGramOptions options = {});

  ScorerCapabilities capabilities() const override;
  RankedPredictions score_fill(
      std::string_view prompt, std::size_t top_n,
      const std::optional<std::vector<std::string>>& candidates = std::nullopt) const override;
  double perplexity(std::string_view sentence) const override;
  std::string identity() const override;

  static std::vector<std::string> tokenize(std::string_view text);
  double log_prob(std::string_view word, std::string_view history) const;
  std::size_t vocab_size() const { return vocab_.size(); }

 private:
  struct Impl;
  explicit NGramScorer(std::shared_ptr<const Impl> impl);
  double fill_score(const std::vector<std::string>& left,
                    const std::vector<std::string>& filler,
                    const std::vector<std::string>& right) const;
  const std::string& map_oov(const std::string& w) const;

  std::shared_ptr<const Impl> impl_;
  std::vector<std::string> vocab_;  // fill candidates, sorted
};

struct RemoteOptions {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::seconds timeout{60};
  int max_in_flight = 8;
};

// Client for a model server speaking the /v1 JSON protocol.
class RemoteScorer final : public Scorer {
 public:
  explicit RemoteScorer(std::string base_url, RemoteOptions options = {});
  ~RemoteScorer() override;

  ScorerCapabilities capabilities() const override;
  RankedPredictions score_fill(
      std::string_view prompt, std::size_t top_n,
      const std::optional<std::vector<std::string>>& candidates = std::nullopt) const override;
  double perplexity(std::string_view sentence) const override;
  std::string identity() const override;

  // POST /v1/finetune. Not retried: the request is not idempotent.
  std::string finetune(const std::string& train_path, const std::string& val_path,
                       int epochs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// "builtin:fixture", "builtin:ngram" or an http(s) URL.
struct ScorerSpec {
  std::string kind;           // fixture | ngram | remote
  std::string location;       // fixture file, n-gram corpus, or URL
  int ngram_order = 2;
  RemoteOptions remote;
};

std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec);

}  // namespace lmprobe
