#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lmprobe/kb.hpp"
#include "lmprobe/templates.hpp"

namespace lmprobe {

// Document-frequency table for unigram TF-IDF vectors. Tokens are lowercase
// runs of ASCII letters and digits.
class DocumentFrequency {
 public:
  static DocumentFrequency build(std::span<const std::string> documents);

  std::size_t documents() const { return n_docs_; }
  std::size_t df(const std::string& token) const;
  // ln(N / (1 + df)) + 1
  double idf(const std::string& token) const;

  static std::vector<std::string> tokenize(std::string_view text);

 private:
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

// Cosine of raw-tf * idf vectors, clamped to [0, 1]; 0 when either vector
// has zero norm.
double tfidf_cosine(std::string_view question, std::string_view context,
                    const DocumentFrequency& stats);

// Lowercase, strip punctuation and the articles a/an/the, collapse spaces.
std::string normalize_answer(std::string_view s);

// An empty gold list is scored as the single gold answer "".
int exact_match(std::string_view prediction, std::span<const std::string> gold);
double f1_score(std::string_view prediction, std::span<const std::string> gold);

enum class DatasetStyle { Squad, Record };

struct AnswerSpan {
  std::string text;
  std::size_t start = 0;  // byte offset into the context
};

struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive, as in ReCoRD files
};

struct QAExample {
  std::string id;
  std::string title;  // SQuAD article title or ReCoRD passage id
  std::string question;
  std::string context;
  std::vector<std::string> gold_answers;
  std::vector<AnswerSpan> answer_spans;
  DatasetStyle style = DatasetStyle::Squad;
  bool is_impossible = false;
  std::vector<EntitySpan> entities;  // ReCoRD only
  std::vector<std::string> type_labels;
};

enum class Site { Question, Context, Highlight };

std::string_view site_name(Site s);

struct AppliedTriple {
  Triple triple;
  Site site = Site::Question;
  std::size_t position = 0;  // byte offset of the inserted text in the result
  std::size_t length = 0;
};

struct AugmentedPair {
  std::string question;
  std::string context;
  std::vector<AppliedTriple> applied;
};

struct SkippedTriple {
  Triple triple;
  std::string reason;
};

struct AugmentResult {
  AugmentedPair pair;
  std::vector<SkippedTriple> skipped;
  QAExample example;  // the input with augmented texts and shifted spans
};

// Inserts each triple as a comma-delimited relative clause after the first
// occurrence of its subject (SQuAD style) or appends an "@highlight" line
// (ReCoRD style). Throws ConfigError for a relation without a clause.
AugmentResult integrate_knowledge(const QAExample& example,
                                  std::span<const Triple> triples,
                                  const TemplateSet& templates);

std::vector<QAExample> read_squad(const std::string& path);
std::vector<QAExample> parse_squad(std::string_view json_text,
                                   const std::string& source = "<input>");
std::vector<QAExample> read_record(const std::string& path);
std::vector<QAExample> parse_record(std::string_view json_text,
                                    const std::string& source = "<input>");

// Same schema as the input files, one paragraph (or passage) per example.
std::string format_dataset(std::span<const QAExample> examples, DatasetStyle style);

// {"id": "answer text", ...}
std::map<std::string, std::string> read_predictions(const std::string& path);
// {"id": ["synonymy", ...], ...}
std::map<std::string, std::vector<std::string>> read_type_labels(const std::string& path);

// Knowledge triples keyed by example id: TSV `id<TAB>subject<TAB>relation<TAB>object`.
std::map<std::string, std::vector<Triple>> read_example_triples(const std::string& path);

struct ScoredExample {
  std::string id;
  double em = 0.0;
  double f1 = 0.0;
  double similarity = 0.0;
};

struct SimilarityBucket {
  double lower = 0.0;
  std::optional<double> upper;  // exclusive; nullopt for the overflow bucket
  std::size_t count = 0;
  double mean_em = 0.0;
  double mean_f1 = 0.0;
};

// 0.0, 0.1, ..., 0.6 with an overflow bucket above 0.6.
std::vector<double> default_similarity_edges();

// Mean EM/F1 per similarity bucket. Edges must be strictly increasing;
// values below the first edge fall into the first bucket.
std::vector<SimilarityBucket> similarity_performance_table(
    std::span<const ScoredExample> examples,
    std::span<const double> edges);

}  // namespace lmprobe
