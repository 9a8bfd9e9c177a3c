#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmprobe/kb.hpp"
#include "lmprobe/scorer.hpp"

namespace lmprobe {

// |top-K tokens ∩ answers| / |answers|. Matching is exact after lowercasing
// and whitespace normalization.
double hits_at_k(const RankedPredictions& predictions,
                 std::span<const std::string> answers, std::size_t k);

// |top-K(a) ∩ top-K(b)| / min(K, max(|a|, |b|)).
double overlap_at_k(const RankedPredictions& a, const RankedPredictions& b,
                    std::size_t k);

// hits@K of `predictions` graded against the opposite relation's answers.
double miss_at_k(const RankedPredictions& predictions,
                 std::span<const std::string> opposite_answers, std::size_t k);

// True iff some answer appears within the top |answers| predictions.
bool hit_within_answer_count(const RankedPredictions& predictions,
                             std::span<const std::string> answers);

struct Summary {
  double mean = 0.0;
  double sem = 0.0;  // sample standard deviation / sqrt(n); 0 when n < 2
  std::size_t n = 0;
};

// Neumaier-compensated mean and standard error.
Summary summarize(std::span<const double> values);

struct QueryResult {
  std::string subject;
  Relation relation{};
  std::vector<std::string> answers;
  RankedPredictions predictions;
  std::map<std::size_t, double> hits;  // K -> ratio
};

QueryResult evaluate_query(std::string subject, Relation relation,
                           std::vector<std::string> answers,
                           RankedPredictions predictions,
                           std::span<const std::size_t> ks);

struct AggregateReport {
  std::vector<std::size_t> ks;
  std::map<Relation, std::map<std::size_t, Summary>> per_relation;
  std::map<std::size_t, Summary> micro;  // over all queries
  std::map<std::size_t, Summary> macro;  // over relation means
};

// Throws ContractError on empty input.
AggregateReport aggregate(std::span<const QueryResult> results,
                          std::span<const std::size_t> ks);

// Tokens ranked by the fraction of lists containing them (ties: lexicographic).
std::vector<std::pair<std::string, double>> top_word_frequencies(
    std::span<const std::vector<std::string>> per_query_topk, std::size_t m);

}  // namespace lmprobe
