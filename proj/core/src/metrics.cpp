#include "lmprobe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "lmprobe/error.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

namespace {

std::set<std::string> normalized_set(std::span<const std::string> items) {
  std::set<std::string> out;
  for (const auto& s : items) out.insert(normalize_phrase(s));
  return out;
}

std::set<std::string> top_k_set(const RankedPredictions& p, std::size_t k) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < p.entries.size() && i < k; ++i)
    out.insert(normalize_phrase(p.entries[i].token));
  return out;
}

class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

double hits_at_k(const RankedPredictions& predictions,
                 std::span<const std::string> answers, std::size_t k) {
  const auto gold = normalized_set(answers);
  if (gold.empty()) throw ContractError("hits@K needs at least one answer");
  if (k == 0) throw ContractError("K must be at least 1");
  std::size_t found = 0;
  for (const auto& t : top_k_set(predictions, k)) found += gold.count(t);
  return static_cast<double>(found) / static_cast<double>(gold.size());
}

double overlap_at_k(const RankedPredictions& a, const RankedPredictions& b,
                    std::size_t k) {
  if (a.entries.empty() || b.entries.empty())
    throw ContractError("overlap@K needs non-empty prediction lists");
  if (k == 0) throw ContractError("K must be at least 1");
  const auto ta = top_k_set(a, k);
  const auto tb = top_k_set(b, k);
  std::size_t shared = 0;
  for (const auto& t : ta) shared += tb.count(t);
  const auto denom = std::min(k, std::max(a.entries.size(), b.entries.size()));
  return static_cast<double>(shared) / static_cast<double>(denom);
}

double miss_at_k(const RankedPredictions& predictions,
                 std::span<const std::string> opposite_answers, std::size_t k) {
  return hits_at_k(predictions, opposite_answers, k);
}

bool hit_within_answer_count(const RankedPredictions& predictions,
                             std::span<const std::string> answers) {
  const auto gold = normalized_set(answers);
  if (gold.empty()) throw ContractError("answers must be non-empty");
  for (const auto& t : top_k_set(predictions, gold.size()))
    if (gold.count(t)) return true;
  return false;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  s.mean = sum.value() / static_cast<double>(s.n);
  if (s.n < 2) return s;
  CompensatedSum sq;
  for (double v : values) sq.add((v - s.mean) * (v - s.mean));
  const double var = sq.value() / static_cast<double>(s.n - 1);
  s.sem = std::sqrt(var) / std::sqrt(static_cast<double>(s.n));
  return s;
}

QueryResult evaluate_query(std::string subject, Relation relation,
                           std::vector<std::string> answers,
                           RankedPredictions predictions,
                           std::span<const std::size_t> ks) {
  QueryResult r{std::move(subject), relation, std::move(answers),
                std::move(predictions), {}};
  for (auto k : ks) r.hits[k] = hits_at_k(r.predictions, r.answers, k);
  return r;
}

AggregateReport aggregate(std::span<const QueryResult> results,
                          std::span<const std::size_t> ks) {
  if (results.empty()) throw ContractError("aggregate needs at least one result");
  AggregateReport report;
  report.ks.assign(ks.begin(), ks.end());

  std::map<Relation, std::vector<const QueryResult*>> by_relation;
  for (const auto& r : results) by_relation[r.relation].push_back(&r);

  for (auto k : ks) {
    std::vector<double> all;
    all.reserve(results.size());
    for (const auto& r : results) all.push_back(r.hits.at(k));
    report.micro[k] = summarize(all);

    std::vector<double> relation_means;
    for (const auto& [rel, rs] : by_relation) {
      std::vector<double> v;
      v.reserve(rs.size());
      for (const auto* r : rs) v.push_back(r->hits.at(k));
      auto s = summarize(v);
      report.per_relation[rel][k] = s;
      relation_means.push_back(s.mean);
    }
    report.macro[k] = summarize(relation_means);
  }
  return report;
}

std::vector<std::pair<std::string, double>> top_word_frequencies(
    std::span<const std::vector<std::string>> per_query_topk, std::size_t m) {
  if (m == 0) throw ContractError("m must be at least 1");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& list : per_query_topk) {
    std::set<std::string> uniq(list.begin(), list.end());
    for (const auto& t : uniq) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > m) ranked.resize(m);
  std::vector<std::pair<std::string, double>> out;
  const double n = static_cast<double>(per_query_topk.size());
  for (auto& [tok, c] : ranked) out.emplace_back(tok, static_cast<double>(c) / n);
  return out;
}

}  // namespace lmprobe
