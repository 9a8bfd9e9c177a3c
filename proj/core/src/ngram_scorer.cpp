#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "lmprobe/error.hpp"
#include "lmprobe/scorer.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

namespace {

constexpr std::string_view kBos = "<s>";
constexpr std::string_view kEos = "</s>";
constexpr std::string_view kUnk = "<unk>";

bool is_token_char(unsigned char c) {
  return is_ascii_alnum(c) || c == '\'' || c == '-' || c >= 0x80;
}

bool is_sentence_end(char c) {
  return c == '.' || c == '!' || c == '?' || c == '\n';
}

std::string bigram_key(std::string_view h, std::string_view w) {
  std::string k(h);
  k.push_back('\x1f');
  k.append(w);
  return k;
}

}  // namespace

struct NGramScorer::Impl {
  int order = 2;
  std::string mask_token;
  std::unordered_map<std::string, std::uint64_t> unigram;  // predicted tokens
  std::unordered_map<std::string, std::uint64_t> context;  // tokens used as history
  std::unordered_map<std::string, std::uint64_t> bigram;
  std::unordered_set<std::string> known;
  std::uint64_t total = 0;
  std::size_t vocab = 0;  // known words + </s> + <unk>
  std::string digest;
};

NGramScorer::NGramScorer(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {
  vocab_.assign(impl_->known.begin(), impl_->known.end());
  std::sort(vocab_.begin(), vocab_.end());
}

std::vector<std::string> NGramScorer::tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_token_char(c)) {
      cur.push_back(static_cast<char>((c >= 'A' && c <= 'Z') ? c + 32 : c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

NGramScorer NGramScorer::train(std::string_view corpus, NGramOptions options) {
  if (options.order != 1 && options.order != 2)
    throw ConfigError("n-gram order must be 1 or 2");
  auto impl = std::make_shared<Impl>();
  impl->order = options.order;
  impl->mask_token = options.mask_token;
  impl->digest = fnv1a_hex(corpus);

  std::size_t start = 0;
  for (std::size_t i = 0; i <= corpus.size(); ++i) {
    if (i < corpus.size() && !is_sentence_end(corpus[i])) continue;
    auto words = tokenize(corpus.substr(start, i - start));
    start = i + 1;
    if (words.empty()) continue;
    std::string prev(kBos);
    for (auto& w : words) {
      impl->known.insert(w);
      ++impl->unigram[w];
      ++impl->context[prev];
      ++impl->bigram[bigram_key(prev, w)];
      ++impl->total;
      prev = w;
    }
    ++impl->unigram[std::string(kEos)];
    ++impl->context[prev];
    ++impl->bigram[bigram_key(prev, kEos)];
    ++impl->total;
  }
  impl->vocab = impl->known.size() + 2;
  return NGramScorer(std::move(impl));
}

NGramScorer NGramScorer::train_file(const std::string& path, NGramOptions options) {
  return train(read_file(path), options);
}

NGramScorer NGramScorer::uniform(const std::vector<std::string>& vocabulary,
                                 NGramOptions options) {
  auto impl = std::make_shared<Impl>();
  impl->order = options.order;
  impl->mask_token = options.mask_token;
  for (const auto& w : vocabulary)
    for (auto& t : tokenize(w)) impl->known.insert(std::move(t));
  impl->vocab = impl->known.size() + 2;
  impl->digest = fnv1a_hex(join(std::vector<std::string>(impl->known.begin(), impl->known.end()), " "));
  return NGramScorer(std::move(impl));
}

const std::string& NGramScorer::map_oov(const std::string& w) const {
  static const std::string unk(kUnk);
  static const std::string eos(kEos);
  if (w == eos || impl_->known.count(w)) return w;
  return unk;
}

double NGramScorer::log_prob(std::string_view word, std::string_view history) const {
  const std::string w = map_oov(std::string(word));
  const double v = static_cast<double>(impl_->vocab);
  auto count = [](const auto& table, const std::string& k) -> double {
    auto it = table.find(k);
    return it == table.end() ? 0.0 : static_cast<double>(it->second);
  };
  if (impl_->order == 1)
    return std::log((count(impl_->unigram, w) + 1.0) /
                    (static_cast<double>(impl_->total) + v));
  const std::string h = history == kBos ? std::string(kBos) : map_oov(std::string(history));
  return std::log((count(impl_->bigram, bigram_key(h, w)) + 1.0) /
                  (count(impl_->context, h) + v));
}

double NGramScorer::fill_score(const std::vector<std::string>& left,
                               const std::vector<std::string>& filler,
                               const std::vector<std::string>& right) const {
  double sum = 0.0;
  std::string prev = left.empty() ? std::string(kBos) : left.back();
  for (const auto& f : filler) {
    sum += log_prob(f, prev);
    prev = f;
  }
  sum += log_prob(right.empty() ? kEos : std::string_view(right.front()), prev);
  return sum / static_cast<double>(filler.size() + 1);
}

ScorerCapabilities NGramScorer::capabilities() const {
  ScorerCapabilities c;
  c.mask_anywhere = false;
  c.mask_token = impl_->mask_token;
  c.vocab_size = static_cast<std::int64_t>(impl_->vocab);
  c.model_name = impl_->order == 1 ? "ngram-unigram" : "ngram-bigram";
  return c;
}

RankedPredictions NGramScorer::score_fill(
    std::string_view prompt, std::size_t top_n,
    const std::optional<std::vector<std::string>>& candidates) const {
  check_fill_request(prompt, impl_->mask_token, top_n);
  const auto mask_at = prompt.find(impl_->mask_token);
  const auto left = tokenize(prompt.substr(0, mask_at));
  const auto right = tokenize(prompt.substr(mask_at + impl_->mask_token.size()));

  RankedPredictions out{std::string(prompt), {}};
  if (candidates) {
    for (const auto& c : *candidates) {
      auto filler = tokenize(c);
      if (filler.empty()) continue;
      out.entries.push_back({c, fill_score(left, filler, right)});
    }
  } else {
    out.entries.reserve(vocab_.size());
    std::vector<std::string> filler(1);
    for (const auto& w : vocab_) {
      filler[0] = w;
      out.entries.push_back({w, fill_score(left, filler, right)});
    }
  }
  canonicalize(out.entries, top_n);
  return out;
}

double NGramScorer::perplexity(std::string_view sentence) const {
  const auto words = tokenize(sentence);
  if (words.empty()) throw ContractError("perplexity of an empty sentence");
  double sum = 0.0;
  std::string prev(kBos);
  for (const auto& w : words) {
    sum += log_prob(w, prev);
    prev = w;
  }
  sum += log_prob(kEos, prev);
  return std::exp(-sum / static_cast<double>(words.size() + 1));
}

std::string NGramScorer::identity() const {
  return "ngram:order=" + std::to_string(impl_->order) + ":" + impl_->digest;
}

}  // namespace lmprobe
