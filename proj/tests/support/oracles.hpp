#pragma once

#include <algorithm>
#include <cctype>
#include <random>
#include <string>
#include <vector>

#include "lmprobe/scorer.hpp"

namespace oracle {

inline std::string lower_trim(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Distinct normalized strings, by pairwise comparison.
inline std::vector<std::string> distinct(const std::vector<std::string>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) {
    auto n = lower_trim(x);
    bool seen = false;
    for (const auto& o : out) seen = seen || o == n;
    if (!seen) out.push_back(n);
  }
  return out;
}

inline std::vector<std::string> head(const lmprobe::RankedPredictions& p, std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < p.entries.size() && i < k; ++i) out.push_back(p.entries[i].token);
  return distinct(out);
}

inline std::size_t shared(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t n = 0;
  for (const auto& x : a)
    for (const auto& y : b)
      if (x == y) ++n;
  return n;
}

inline double hits(const lmprobe::RankedPredictions& p, const std::vector<std::string>& answers,
                   std::size_t k) {
  auto gold = distinct(answers);
  return static_cast<double>(shared(head(p, k), gold)) / static_cast<double>(gold.size());
}

inline double overlap(const lmprobe::RankedPredictions& a, const lmprobe::RankedPredictions& b,
                      std::size_t k) {
  const std::size_t longest = std::max(a.entries.size(), b.entries.size());
  const std::size_t denom = k < longest ? k : longest;
  return static_cast<double>(shared(head(a, k), head(b, k))) / static_cast<double>(denom);
}

struct Instance {
  lmprobe::RankedPredictions a, b;
  std::vector<std::string> answers, opposite;
  std::size_t k = 1;
};

// Up to 50 ranked tokens over a 60-word pool, up to 8 answers.
inline Instance random_instance(std::mt19937_64& rng) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto word = [&] { return "w" + std::to_string(pick(0, 59)); };
  auto ranked = [&] {
    lmprobe::RankedPredictions p;
    std::vector<std::string> pool;
    for (int i = 0; i < 60; ++i) pool.push_back("w" + std::to_string(i));
    std::shuffle(pool.begin(), pool.end(), rng);
    const auto n = pick(1, 50);
    for (std::size_t i = 0; i < n; ++i)
      p.entries.push_back({pool[i], -static_cast<double>(i) * 0.5});
    return p;
  };
  Instance in;
  in.a = ranked();
  in.b = ranked();
  for (auto n = pick(1, 8); n > 0; --n) in.answers.push_back(word());
  for (auto n = pick(1, 8); n > 0; --n) in.opposite.push_back(word());
  in.k = pick(1, 60);
  return in;
}

}  // namespace oracle
