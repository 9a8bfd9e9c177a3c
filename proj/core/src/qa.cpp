#include "lmprobe/qa.hpp"

#include <algorithm>
#include <cmath>

#include "lmprobe/error.hpp"
#include "lmprobe/prompt.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

// ---------------------------------------------------------------------------
// TF-IDF

std::vector<std::string> DocumentFrequency::tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_ascii_alnum(c)) {
      cur.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

DocumentFrequency DocumentFrequency::build(std::span<const std::string> documents) {
  DocumentFrequency d;
  d.n_docs_ = documents.size();
  for (const auto& doc : documents) {
    auto toks = tokenize(doc);
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    for (auto& t : toks) ++d.df_[t];
  }
  return d;
}

std::size_t DocumentFrequency::df(const std::string& token) const {
  auto it = df_.find(token);
  return it == df_.end() ? 0 : it->second;
}

double DocumentFrequency::idf(const std::string& token) const {
  const double n = static_cast<double>(std::max<std::size_t>(n_docs_, 1));
  return std::log(n / (1.0 + static_cast<double>(df(token)))) + 1.0;
}

namespace {

std::map<std::string, double> tfidf_vector(std::string_view text,
                                           const DocumentFrequency& stats) {
  std::map<std::string, double> v;
  for (auto& t : DocumentFrequency::tokenize(text)) v[t] += 1.0;
  for (auto& [t, w] : v) w *= stats.idf(t);
  return v;
}

}  // namespace

double tfidf_cosine(std::string_view question, std::string_view context,
                    const DocumentFrequency& stats) {
  const auto a = tfidf_vector(question, stats);
  const auto b = tfidf_vector(context, stats);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, w] : a) {
    na += w * w;
    auto it = b.find(t);
    if (it != b.end()) dot += w * it->second;
  }
  for (const auto& [t, w] : b) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// EM / F1

namespace {

bool is_ascii_punct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}

std::vector<std::string> answer_tokens(std::string_view s) {
  std::string stripped;
  stripped.reserve(s.size());
  for (unsigned char c : s) {
    if (is_ascii_punct(c)) continue;
    stripped.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c));
  }
  std::vector<std::string> out;
  for (auto& t : split_whitespace(stripped))
    if (t != "a" && t != "an" && t != "the") out.push_back(std::move(t));
  return out;
}

double f1_single(const std::vector<std::string>& pred, std::vector<std::string> gold) {
  if (pred.empty() || gold.empty()) return pred == gold ? 1.0 : 0.0;
  auto p = pred;
  std::sort(p.begin(), p.end());
  std::sort(gold.begin(), gold.end());
  std::vector<std::string> common;
  std::set_intersection(p.begin(), p.end(), gold.begin(), gold.end(),
                        std::back_inserter(common));
  if (common.empty()) return 0.0;
  const double precision = static_cast<double>(common.size()) / static_cast<double>(p.size());
  const double recall = static_cast<double>(common.size()) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

const std::vector<std::string> kNoAnswer{""};

}  // namespace

std::string normalize_answer(std::string_view s) { return join(answer_tokens(s), " "); }

int exact_match(std::string_view prediction, std::span<const std::string> gold) {
  if (gold.empty()) gold = kNoAnswer;
  const auto p = normalize_answer(prediction);
  for (const auto& g : gold)
    if (normalize_answer(g) == p) return 1;
  return 0;
}

double f1_score(std::string_view prediction, std::span<const std::string> gold) {
  if (gold.empty()) gold = kNoAnswer;
  const auto p = answer_tokens(prediction);
  double best = 0.0;
  for (const auto& g : gold) best = std::max(best, f1_single(p, answer_tokens(g)));
  return best;
}

// ---------------------------------------------------------------------------
// Knowledge integration

std::string_view site_name(Site s) {
  switch (s) {
    case Site::Question: return "question";
    case Site::Context: return "context";
    case Site::Highlight: return "highlight";
  }
  return "?";
}

namespace {

bool is_ascii_punct_at(const std::string& text, std::size_t at) {
  return at < text.size() && is_ascii_punct(static_cast<unsigned char>(text[at]));
}

struct Insertion {
  std::size_t original_pos;
  std::string clause;
  std::size_t applied_index;
  std::size_t length = 0;
};

// ", which ..." followed by a comma unless punctuation or the end of the text
// comes next. Clauses sharing a site are chained.
std::string render(const std::string& original, const Insertion& i, bool chained) {
  std::string s = ", " + i.clause;
  if (!chained && i.original_pos < original.size() && !is_ascii_punct_at(original, i.original_pos))
    s += ",";
  return s;
}

std::string apply_insertions(const std::string& original, std::vector<Insertion>& ins,
                             std::vector<AppliedTriple>& applied) {
  std::stable_sort(ins.begin(), ins.end(), [](const Insertion& a, const Insertion& b) {
    return a.original_pos < b.original_pos;
  });
  std::string out;
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < ins.size(); ++k) {
    auto& i = ins[k];
    out.append(original, cursor, i.original_pos - cursor);
    cursor = i.original_pos;
    const bool chained = k + 1 < ins.size() && ins[k + 1].original_pos == i.original_pos;
    const auto text = render(original, i, chained);
    i.length = text.size();
    applied[i.applied_index].position = out.size();
    applied[i.applied_index].length = text.size();
    out += text;
  }
  out.append(original, cursor, std::string::npos);
  return out;
}

std::size_t shift(std::size_t pos, const std::vector<Insertion>& ins) {
  std::size_t delta = 0;
  for (const auto& i : ins)
    if (i.original_pos <= pos) delta += i.length;
  return pos + delta;
}

}  // namespace

AugmentResult integrate_knowledge(const QAExample& example, std::span<const Triple> triples,
                                  const TemplateSet& templates) {
  AugmentResult r;
  r.example = example;
  auto& applied = r.pair.applied;

  if (example.style == DatasetStyle::Record) {
    std::string context = example.context;
    for (const auto& t : triples) {
      const auto statement = relation_statement(t.relation, t.subject, t.object, templates);
      const std::string line = "\n@highlight " + statement;
      AppliedTriple a{t, Site::Highlight, context.size(), line.size()};
      context += line;
      applied.push_back(a);
    }
    r.pair.question = example.question;
    r.pair.context = context;
    r.example.context = context;
    return r;
  }

  std::vector<Insertion> q_ins, c_ins;
  for (const auto& t : triples) {
    const auto clause = relative_clause(t.relation, t.object, templates);
    const auto sq = find_word(example.question, t.subject);
    const auto sc = find_word(example.context, t.subject);
    if (sq != std::string::npos && contains_word(example.context, t.object)) {
      const auto at = sq + t.subject.size();
      q_ins.push_back({at, clause, applied.size()});
      applied.push_back({t, Site::Question, 0, 0});
    } else if (sc != std::string::npos && contains_word(example.question, t.object)) {
      const auto at = sc + t.subject.size();
      bool splits = false;
      for (const auto& span : example.answer_spans)
        if (span.start < at && at < span.start + span.text.size()) splits = true;
      if (splits) {
        r.skipped.push_back({t, "insertion would split an answer span"});
        continue;
      }
      c_ins.push_back({at, clause, applied.size()});
      applied.push_back({t, Site::Context, 0, 0});
    } else {
      r.skipped.push_back({t, sq == std::string::npos && sc == std::string::npos
                                  ? "subject not found"
                                  : "object not found on the opposite side"});
    }
  }

  r.pair.question = apply_insertions(example.question, q_ins, applied);
  r.pair.context = apply_insertions(example.context, c_ins, applied);
  r.example.question = r.pair.question;
  r.example.context = r.pair.context;
  for (auto& span : r.example.answer_spans) span.start = shift(span.start, c_ins);
  return r;
}

// ---------------------------------------------------------------------------
// Similarity buckets

std::vector<double> default_similarity_edges() {
  return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
}

std::vector<SimilarityBucket> similarity_performance_table(
    std::span<const ScoredExample> examples, std::span<const double> edges) {
  if (edges.empty()) throw ContractError("similarity table needs at least one edge");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1]))
      throw ContractError("similarity edges must be strictly increasing");

  std::vector<SimilarityBucket> out(edges.size());
  std::vector<double> em(edges.size(), 0.0), f1(edges.size(), 0.0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out[i].lower = edges[i];
    if (i + 1 < edges.size()) out[i].upper = edges[i + 1];
  }
  for (const auto& e : examples) {
    auto it = std::upper_bound(edges.begin(), edges.end(), e.similarity);
    std::size_t b = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
    ++out[b].count;
    em[b] += e.em;
    f1[b] += e.f1;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].count == 0) continue;
    out[i].mean_em = em[i] / static_cast<double>(out[i].count);
    out[i].mean_f1 = f1[i] / static_cast<double>(out[i].count);
  }
  return out;
}

}  // namespace lmprobe
