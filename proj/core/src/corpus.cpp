#include "lmprobe/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <queue>
#include <thread>

#include "lmprobe/error.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

namespace fs = std::filesystem;

namespace {

inline bool is_terminator(unsigned char c) {
  return c == '.' || c == '!' || c == '?' || c == '\n';
}

inline void lower_in_place(std::string& s) {
  for (auto& ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (c >= 'A' && c <= 'Z') ch = static_cast<char>(c + 32);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Automaton

PhraseMatcher PhraseMatcher::compile(std::span<const std::string> phrases) {
  if (phrases.empty()) throw ContractError("compile_patterns: no phrases");
  PhraseMatcher m;

  // Trie with temporary sorted child lists.
  std::vector<std::vector<std::pair<unsigned char, std::uint32_t>>> children(1);
  m.nodes_.emplace_back();
  for (const auto& raw : phrases) {
    auto phrase = normalize_phrase(raw);
    if (phrase.empty()) throw ContractError("compile_patterns: empty phrase");
    if (m.ids_.count(phrase)) continue;
    const auto id = static_cast<std::uint32_t>(m.patterns_.size());
    std::uint32_t state = 0;
    for (unsigned char c : phrase) {
      auto& kids = children[state];
      auto it = std::lower_bound(kids.begin(), kids.end(), c,
                                 [](const auto& e, unsigned char v) { return e.first < v; });
      if (it != kids.end() && it->first == c) {
        state = it->second;
      } else {
        const auto next = static_cast<std::uint32_t>(m.nodes_.size());
        kids.insert(it, {c, next});
        m.nodes_.emplace_back();
        children.emplace_back();
        state = next;
      }
    }
    m.nodes_[state].pattern = id;
    m.ids_.emplace(phrase, id);
    m.pattern_length_.push_back(static_cast<std::uint32_t>(phrase.size()));
    m.patterns_.push_back(std::move(phrase));
  }

  // Flatten edges.
  for (std::size_t s = 0; s < m.nodes_.size(); ++s) {
    m.nodes_[s].edge_begin = static_cast<std::uint32_t>(m.edge_bytes_.size());
    m.nodes_[s].edge_count = static_cast<std::uint32_t>(children[s].size());
    for (const auto& [c, t] : children[s]) {
      m.edge_bytes_.push_back(c);
      m.edge_targets_.push_back(t);
    }
  }
  for (auto& r : m.root_next_) r = 0;
  for (const auto& [c, t] : children[0]) m.root_next_[c] = t;

  // Breadth-first failure and output links.
  std::queue<std::uint32_t> q;
  for (const auto& [c, t] : children[0]) {
    m.nodes_[t].fail = 0;
    q.push(t);
  }
  while (!q.empty()) {
    const auto s = q.front();
    q.pop();
    for (const auto& [c, t] : children[s]) {
      const auto f = m.step(m.nodes_[s].fail, c);
      m.nodes_[t].fail = f;
      m.nodes_[t].output = m.nodes_[f].pattern != kNone ? f : m.nodes_[f].output;
      q.push(t);
    }
  }
  return m;
}

std::uint32_t PhraseMatcher::edge(std::uint32_t state, unsigned char c) const {
  const auto& n = nodes_[state];
  const auto* bytes = edge_bytes_.data() + n.edge_begin;
  for (std::uint32_t i = 0; i < n.edge_count; ++i) {
    if (bytes[i] == c) return edge_targets_[n.edge_begin + i];
    if (bytes[i] > c) break;
  }
  return kNone;
}

std::uint32_t PhraseMatcher::step(std::uint32_t state, unsigned char c) const {
  while (state != 0) {
    auto t = edge(state, c);
    if (t != kNone) return t;
    state = nodes_[state].fail;
  }
  return root_next_[c];
}

std::optional<std::uint32_t> PhraseMatcher::id_of(std::string_view phrase) const {
  auto it = ids_.find(normalize_phrase(phrase));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void PhraseMatcher::find_all(std::string_view text, std::vector<Match>& out) const {
  std::uint32_t state = 0;
  const auto n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    state = step(state, static_cast<unsigned char>(text[i]));
    auto s = nodes_[state].pattern != kNone ? state : nodes_[state].output;
    for (; s != kNone; s = nodes_[s].output) {
      const auto id = nodes_[s].pattern;
      const std::size_t end = i + 1;
      const std::size_t begin = end - pattern_length_[id];
      if (begin > 0 && is_letter(static_cast<unsigned char>(text[begin - 1]))) continue;
      if (end < n && is_letter(static_cast<unsigned char>(text[end]))) continue;
      out.push_back({id, begin, end});
    }
  }
}

// ---------------------------------------------------------------------------
// Co-occurrence counting

struct PairIndex {
  std::vector<std::uint32_t> subject_id, object_id;
  // subject pattern -> (object pattern, pair index)
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> by_subject;
};

struct Counts {
  std::vector<std::uint64_t> occurrences;
  std::vector<std::uint64_t> joint;

  void merge(const Counts& o) {
    for (std::size_t i = 0; i < occurrences.size(); ++i) occurrences[i] += o.occurrences[i];
    for (std::size_t i = 0; i < joint.size(); ++i) joint[i] += o.joint[i];
  }
};

class CooccurrenceScanner {
 public:
  CooccurrenceScanner(const PhraseMatcher& m, const PairIndex& idx)
      : m_(m), idx_(idx), stamp_(m.pattern_count(), 0) {
    counts_.occurrences.assign(m.pattern_count(), 0);
    counts_.joint.assign(idx.subject_id.size(), 0);
  }

  // `text` must be lowercase and consist of whole sentences.
  void scan(std::string_view text) {
    using Node = PhraseMatcher::Node;
    constexpr auto kNone = PhraseMatcher::kNone;
    const Node* nodes = m_.nodes_.data();
    const auto* lengths = m_.pattern_length_.data();
    const auto n = text.size();
    std::uint32_t state = 0;
    new_sentence();
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<unsigned char>(text[i]);
      if (is_terminator(c)) {
        finish_sentence();
        new_sentence();
        state = 0;
        continue;
      }
      state = state == 0 ? m_.root_next_[c] : m_.step(state, c);
      if (state == 0) continue;
      auto s = nodes[state].pattern != kNone ? state : nodes[state].output;
      for (; s != kNone; s = nodes[s].output) {
        const auto id = nodes[s].pattern;
        const std::size_t end = i + 1;
        const std::size_t begin = end - lengths[id];
        if (begin > 0 && is_letter(static_cast<unsigned char>(text[begin - 1]))) continue;
        if (end < n && is_letter(static_cast<unsigned char>(text[end]))) continue;
        ++counts_.occurrences[id];
        if (stamp_[id] != sentence_) {
          stamp_[id] = sentence_;
          present_.push_back(id);
        }
      }
    }
    finish_sentence();
  }

  Counts& counts() { return counts_; }

 private:
  void new_sentence() {
    ++sentence_;
    present_.clear();
  }

  void finish_sentence() {
    for (auto p : present_)
      for (const auto& [obj, pair] : idx_.by_subject[p])
        if (stamp_[obj] == sentence_) ++counts_.joint[pair];
  }

  const PhraseMatcher& m_;
  const PairIndex& idx_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t sentence_ = 0;
  std::vector<std::uint32_t> present_;
  Counts counts_;
};

namespace {

PairIndex index_pairs(const PhraseMatcher& m, std::span<const PhrasePair> pairs) {
  PairIndex idx;
  idx.by_subject.resize(m.pattern_count());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto s = m.id_of(pairs[i].first);
    auto o = m.id_of(pairs[i].second);
    if (!s || !o)
      throw ContractError("pair phrase missing from matcher: " + pairs[i].first +
                          " / " + pairs[i].second);
    idx.subject_id.push_back(*s);
    idx.object_id.push_back(*o);
    idx.by_subject[*s].emplace_back(*o, static_cast<std::uint32_t>(i));
  }
  return idx;
}

std::vector<PairFrequency> collect(const PhraseMatcher& m, const PairIndex& idx,
                                   std::span<const PhrasePair> pairs, const Counts& c) {
  std::vector<PairFrequency> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.push_back({m.pattern(idx.subject_id[i]), m.pattern(idx.object_id[i]),
                   c.occurrences[idx.subject_id[i]], c.occurrences[idx.object_id[i]],
                   c.joint[i]});
  }
  return out;
}

PhraseMatcher matcher_for(std::span<const PhrasePair> pairs) {
  std::vector<std::string> phrases;
  phrases.reserve(pairs.size() * 2);
  for (const auto& [s, o] : pairs) {
    phrases.push_back(s);
    phrases.push_back(o);
  }
  return PhraseMatcher::compile(phrases);
}

struct Shard {
  std::size_t file;
  std::uint64_t begin;
  std::uint64_t end;
};

// Reads the sentences that start inside [shard.begin, shard.end), extending
// past `end` until the last of them is terminated.
std::string read_shard(const std::string& path, const Shard& shard, std::uint64_t file_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read corpus shard " + path);

  std::uint64_t start = shard.begin;
  if (start > 0) {
    in.seekg(static_cast<std::streamoff>(start - 1));
    char prev = 0;
    in.get(prev);
    if (!is_terminator(static_cast<unsigned char>(prev))) {
      // Skip the tail of a sentence owned by the previous shard.
      std::string buf(1 << 16, '\0');
      bool found = false;
      while (!found && start < shard.end) {
        const auto want = std::min<std::uint64_t>(buf.size(), shard.end - start);
        in.read(buf.data(), static_cast<std::streamsize>(want));
        const auto got = static_cast<std::uint64_t>(in.gcount());
        if (got == 0) break;
        for (std::uint64_t i = 0; i < got; ++i)
          if (is_terminator(static_cast<unsigned char>(buf[i]))) {
            start += i + 1;
            found = true;
            break;
          }
        if (!found) start += got;
      }
      if (!found || start >= shard.end) return {};
    }
  }

  std::string text(shard.end - start, '\0');
  in.clear();
  in.seekg(static_cast<std::streamoff>(start));
  in.read(text.data(), static_cast<std::streamsize>(text.size()));
  if (static_cast<std::uint64_t>(in.gcount()) != text.size())
    throw IoError("short read in corpus shard " + path);

  std::uint64_t pos = shard.end;
  std::string more(1 << 16, '\0');
  while (!text.empty() && !is_terminator(static_cast<unsigned char>(text.back())) &&
         pos < file_size) {
    in.read(more.data(), static_cast<std::streamsize>(more.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    std::size_t take = got;
    for (std::size_t i = 0; i < got; ++i)
      if (is_terminator(static_cast<unsigned char>(more[i]))) {
        take = i + 1;
        break;
      }
    text.append(more.data(), take);
    pos += take;
    if (take < got) break;
  }
  return text;
}

}  // namespace

std::vector<PairFrequency> scan_corpus(std::span<const std::string> files,
                                       const PhraseMatcher& matcher,
                                       std::span<const PhrasePair> pairs,
                                       const ScanOptions& options) {
  const auto idx = index_pairs(matcher, pairs);

  std::vector<Shard> shards;
  std::vector<std::uint64_t> sizes;
  const std::uint64_t shard_bytes = std::max<std::size_t>(options.shard_bytes, 1);
  for (std::size_t f = 0; f < files.size(); ++f) {
    std::error_code ec;
    const auto size = fs::file_size(files[f], ec);
    if (ec) throw IoError("cannot read corpus shard " + files[f] + ": " + ec.message());
    sizes.push_back(size);
    for (std::uint64_t b = 0; b < size; b += shard_bytes)
      shards.push_back({f, b, std::min<std::uint64_t>(size, b + shard_bytes)});
  }

  const int workers = std::max(1, std::min<int>(options.threads, static_cast<int>(std::max<std::size_t>(1, shards.size()))));
  std::vector<CooccurrenceScanner> scanners;
  scanners.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) scanners.emplace_back(matcher, idx);

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  auto work = [&](int w) {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < shards.size();) {
        auto text = read_shard(files[shards[i].file], shards[i], sizes[shards[i].file]);
        lower_in_place(text);
        scanners[static_cast<std::size_t>(w)].scan(text);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
      next.store(shards.size());
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  auto& total = scanners.front().counts();
  for (std::size_t w = 1; w < scanners.size(); ++w) total.merge(scanners[w].counts());
  return collect(matcher, idx, pairs, total);
}

std::vector<PairFrequency> scan_corpus(std::span<const std::string> files,
                                       std::span<const PhrasePair> pairs,
                                       const ScanOptions& options) {
  const auto matcher = matcher_for(pairs);
  return scan_corpus(files, matcher, pairs, options);
}

std::vector<PairFrequency> scan_text(std::string_view text, std::span<const PhrasePair> pairs) {
  const auto matcher = matcher_for(pairs);
  const auto idx = index_pairs(matcher, pairs);
  CooccurrenceScanner scanner(matcher, idx);
  std::string lowered(text);
  lower_in_place(lowered);
  scanner.scan(lowered);
  return collect(matcher, idx, pairs, scanner.counts());
}

std::vector<std::string> list_corpus_files(const std::string& dir) {
  std::error_code ec;
  if (fs::is_regular_file(dir, ec)) return {dir};
  if (!fs::is_directory(dir, ec)) throw IoError("corpus directory not found: " + dir);
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".txt") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PhrasePair> read_pair_list(const std::string& path) {
  std::vector<PhrasePair> out;
  std::size_t line_no = 0;
  for (auto line : split(read_file(path), '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto f = split(line, '\t');
    if (f.size() < 2 || normalize_phrase(f[0]).empty() || normalize_phrase(f[1]).empty())
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected subject<TAB>object");
    out.emplace_back(normalize_phrase(f[0]), normalize_phrase(f[1]));
  }
  return out;
}

std::string format_pair_frequency_tsv(std::span<const PairFrequency> rows) {
  std::string out = "subject\tobject\tsubject_count\tobject_count\tjoint_count\n";
  for (const auto& r : rows) {
    out += r.subject + '\t' + r.object + '\t' + std::to_string(r.subject_count) + '\t' +
           std::to_string(r.object_count) + '\t' + std::to_string(r.joint_count) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Buckets and correlation

BucketSpec BucketSpec::log_decades() { return {{0, 1, 10, 100, 1000}}; }

BucketSpec BucketSpec::parse(std::string_view csv) {
  BucketSpec spec;
  for (const auto& part : split(csv, ',')) {
    auto t = collapse_whitespace(part);
    if (t.empty()) continue;
    try {
      std::size_t used = 0;
      spec.edges.push_back(std::stoull(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw ConfigError("bad bucket edge: " + t);
    }
  }
  spec.validate();
  return spec;
}

void BucketSpec::validate() const {
  if (edges.empty() || edges.front() != 0)
    throw ContractError("bucket edges must start at 0");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (edges[i] <= edges[i - 1]) throw ContractError("bucket edges must be strictly increasing");
}

std::size_t BucketSpec::index_of(std::uint64_t value) const {
  auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

namespace {

std::vector<HistogramBucket> empty_buckets(const BucketSpec& spec) {
  std::vector<HistogramBucket> out;
  for (std::size_t i = 0; i < spec.edges.size(); ++i) {
    HistogramBucket b;
    b.lower = spec.edges[i];
    if (i + 1 < spec.edges.size()) b.upper = spec.edges[i + 1];
    out.push_back(b);
  }
  return out;
}

}  // namespace

std::vector<HistogramBucket> bucket_joint(std::span<const PairFrequency> pairs,
                                          const BucketSpec& spec) {
  spec.validate();
  auto out = empty_buckets(spec);
  for (const auto& p : pairs) ++out[spec.index_of(p.joint_count)].count;
  return out;
}

std::optional<double> CorrelationCell::proportion() const {
  if (population == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(population);
}

Correlation correlate_hits(std::span<const PairFrequency> pairs,
                           std::span<const ProbeHit> hits, HitMode mode,
                           const BucketSpec& joint_edges,
                           const BucketSpec& subject_edges, std::uint64_t min_joint) {
  joint_edges.validate();
  subject_edges.validate();

  std::map<std::pair<std::string, std::string>, const PairFrequency*> by_pair;
  for (const auto& p : pairs)
    by_pair.emplace(std::pair{normalize_phrase(p.subject), normalize_phrase(p.object)}, &p);

  Correlation c;
  c.mode = mode;
  c.min_joint = min_joint;
  c.joint_buckets = empty_buckets(joint_edges);
  c.subject_buckets = empty_buckets(subject_edges);
  c.by_joint.assign(joint_edges.size(), {});
  c.heatmap.assign(joint_edges.size(), std::vector<CorrelationCell>(subject_edges.size()));

  for (const auto& h : hits) {
    auto it = by_pair.find({normalize_phrase(h.subject), normalize_phrase(h.object)});
    if (it == by_pair.end()) {
      c.residue.push_back(h);
      continue;
    }
    const auto& f = *it->second;
    if (f.joint_count < min_joint) continue;

    const std::size_t k = mode == HitMode::Top100 ? 100 : std::max<std::size_t>(1, h.answer_count);
    const auto target = normalize_phrase(h.object);
    bool hit = false;
    for (std::size_t i = 0; i < h.predictions.size() && i < k; ++i)
      if (normalize_phrase(h.predictions[i]) == target) {
        hit = true;
        break;
      }

    const auto jb = joint_edges.index_of(f.joint_count);
    const auto sb = subject_edges.index_of(f.subject_count);
    ++c.joint_buckets[jb].count;
    ++c.subject_buckets[sb].count;
    ++c.by_joint[jb].population;
    ++c.heatmap[jb][sb].population;
    if (hit) {
      ++c.by_joint[jb].hits;
      ++c.heatmap[jb][sb].hits;
    }
  }
  return c;
}

}  // namespace lmprobe
