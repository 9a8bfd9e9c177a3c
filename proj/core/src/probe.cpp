#include "lmprobe/probe.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include <nlohmann/json.hpp>

#include "lmprobe/error.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first
// failure by index after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; !failed.load() && (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void check_ks(const std::vector<std::size_t>& ks) {
  if (ks.empty()) throw ContractError("at least one K is required");
  for (auto k : ks)
    if (k == 0) throw ContractError("K must be at least 1");
}

std::size_t depth(const ProbeOptions& o) {
  if (o.top_n > 0) return o.top_n;
  return *std::max_element(o.ks.begin(), o.ks.end());
}

bool is_multi_word(const std::string& answer) {
  return answer.find(' ') != std::string::npos;
}

RankedPredictions fill(const Scorer& scorer, const std::string& prompt,
                       const std::vector<std::string>& answers, const ProbeOptions& o) {
  auto preds = scorer.score_fill(prompt, depth(o));
  if (!o.multi_token) return preds;
  std::vector<std::string> phrases;
  for (const auto& a : answers)
    if (is_multi_word(a)) phrases.push_back(a);
  if (phrases.empty()) return preds;
  auto extra = scorer.score_fill(prompt, phrases.size(), phrases);
  preds.entries.insert(preds.entries.end(), extra.entries.begin(), extra.entries.end());
  canonicalize(preds.entries, depth(o));
  return preds;
}

std::map<std::size_t, double> hits_for(const RankedPredictions& p,
                                       const std::vector<std::string>& answers,
                                       const std::vector<std::size_t>& ks) {
  std::map<std::size_t, double> out;
  for (auto k : ks) out[k] = hits_at_k(p, answers, k);
  return out;
}

}  // namespace

std::vector<std::size_t> parse_ks(std::string_view csv) {
  std::vector<std::size_t> out;
  for (const auto& part : split(csv, ',')) {
    auto t = collapse_whitespace(part);
    if (t.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || v == 0 || t.front() == '-') throw ConfigError("bad K value: " + t);
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("no K values given");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ProbeRun run_probe(std::span<const ProbeQuery> queries, const TemplateSet& templates,
                   const Scorer& scorer, const ProbeOptions& options) {
  if (queries.empty()) throw ContractError("no queries to probe");
  check_ks(options.ks);

  ProbeRun run;
  run.records.resize(queries.size());
  parallel_for(queries.size(), options.threads, [&](std::size_t i) {
    const auto& q = queries[i];
    auto& rec = run.records[i];
    rec.prompt = select_masked_prompt(q, templates, scorer, options.prompt);
    auto preds = fill(scorer, rec.prompt.text, q.answers, options);
    rec.result = evaluate_query(q.subject, q.relation, q.answers, std::move(preds), options.ks);
    if (options.compare_templates) {
      for (const auto& w : rec.prompt.template_winners) {
        auto p = w.template_index == rec.prompt.chosen_template
                     ? rec.result.predictions
                     : fill(scorer, w.text, q.answers, options);
        rec.template_hits.push_back(hits_for(p, q.answers, options.ks));
      }
    }
  });

  std::vector<QueryResult> results;
  results.reserve(run.records.size());
  for (const auto& r : run.records) results.push_back(r.result);
  run.aggregate = aggregate(results, options.ks);

  if (options.compare_templates) {
    std::vector<QueryResult> averaged;
    for (const auto& r : run.records) {
      if (r.template_hits.empty()) continue;
      QueryResult a;
      a.subject = r.result.subject;
      a.relation = r.result.relation;
      a.answers = r.result.answers;
      for (auto k : options.ks) {
        double sum = 0.0;
        for (const auto& h : r.template_hits) sum += h.at(k);
        a.hits[k] = sum / static_cast<double>(r.template_hits.size());
      }
      averaged.push_back(std::move(a));
    }
    run.template_average = aggregate(averaged, options.ks);
  }

  for (const auto& r : run.records)
    for (const auto& a : r.result.answers)
      if (is_multi_word(a)) ++run.multi_token_answers;

  if (options.top_words > 0) {
    std::vector<std::vector<std::string>> lists;
    std::map<Relation, std::vector<std::vector<std::string>>> by_relation;
    for (const auto& r : run.records) {
      auto top = r.result.predictions.top_tokens(options.top_words_k);
      by_relation[r.result.relation].push_back(top);
      lists.push_back(std::move(top));
    }
    run.top_words = top_word_frequencies(lists, options.top_words);
    for (const auto& [rel, l] : by_relation)
      run.top_words_by_relation[rel] = top_word_frequencies(l, options.top_words);
  }
  return run;
}

OppositeRun run_opposite(std::span<const OppositeProbe> probes, const TemplateSet& templates,
                         const Scorer& scorer, const ProbeOptions& options) {
  if (probes.empty()) throw ContractError("no opposite probes");
  check_ks(options.ks);

  OppositeRun run;
  run.ks = options.ks;
  run.records.resize(probes.size());
  parallel_for(probes.size(), options.threads, [&](std::size_t i) {
    const auto& p = probes[i];
    auto& rec = run.records[i];
    rec.probe = p;
    rec.prompt_pos = select_masked_prompt({p.subject, p.relation_pos, p.answers_pos}, templates,
                                          scorer, options.prompt);
    rec.prompt_neg = select_masked_prompt({p.subject, p.relation_neg, p.answers_neg}, templates,
                                          scorer, options.prompt);
    rec.predictions_pos = fill(scorer, rec.prompt_pos.text, p.answers_pos, options);
    rec.predictions_neg = fill(scorer, rec.prompt_neg.text, p.answers_neg, options);
    for (auto k : options.ks) {
      rec.overlap[k] = overlap_at_k(rec.predictions_pos, rec.predictions_neg, k);
      rec.miss_pos[k] = miss_at_k(rec.predictions_pos, p.answers_neg, k);
      rec.miss_neg[k] = miss_at_k(rec.predictions_neg, p.answers_pos, k);
    }
  });

  std::vector<std::pair<Relation, Relation>> order;
  std::map<std::pair<Relation, Relation>, std::vector<const OppositeRecord*>> groups;
  for (const auto& r : run.records) {
    const std::pair key{r.probe.relation_pos, r.probe.relation_neg};
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  for (const auto& key : order) {
    const auto& rs = groups[key];
    OppositeSummary s;
    s.relation_pos = key.first;
    s.relation_neg = key.second;
    s.subjects = rs.size();
    for (auto k : options.ks) {
      std::vector<double> ov, mp, mn;
      for (const auto* r : rs) {
        ov.push_back(r->overlap.at(k));
        mp.push_back(r->miss_pos.at(k));
        mn.push_back(r->miss_neg.at(k));
      }
      s.overlap[k] = summarize(ov);
      s.miss_pos[k] = summarize(mp);
      s.miss_neg[k] = summarize(mn);
    }
    run.pairs.push_back(std::move(s));
  }
  return run;
}

std::string format_predictions_jsonl(std::span<const ProbeRecord> records) {
  using nlohmann::json;
  std::string out;
  for (const auto& r : records) {
    json preds = json::array();
    for (const auto& e : r.result.predictions.entries)
      preds.push_back({{"logprob", e.logprob}, {"token", e.token}});
    json hits = json::object();
    for (const auto& [k, v] : r.result.hits) hits["hits@" + std::to_string(k)] = v;
    json line = {{"answers", r.result.answers},
                 {"hits", hits},
                 {"perplexity", r.prompt.perplexity},
                 {"predictions", preds},
                 {"prompt", r.prompt.text},
                 {"relation", relation_name(r.result.relation)},
                 {"subject", r.result.subject},
                 {"template", r.prompt.chosen_template},
                 {"variant", r.prompt.chosen_variant}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace lmprobe
