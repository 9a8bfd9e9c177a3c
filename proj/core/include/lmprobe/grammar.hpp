#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lmprobe {

enum class PosTag { Noun, Verb, Adjective, Number, Other };

std::string_view pos_name(PosTag tag);

// Coarse word -> POS lexicon. Each entry lists its tags in preference order;
// inflected forms carry their lemma.
class Lexicon {
 public:
  struct Entry {
    std::vector<PosTag> tags;
    std::string lemma;  // empty for base forms
  };

  // The bundled ~5k-word lexicon.
  static const Lexicon& builtin();
  // Rows of `word<TAB>tag[,tag...]<TAB>lemma`; '#' starts a comment line.
  static Lexicon parse(std::string_view tsv);

  const Entry* find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, Entry> entries_;
};

struct TokenContext {
  std::string_view previous;
  std::string_view next;
};

// Lexicon first (its preferred tag, nudged by context), then suffix rules,
// defaulting to Noun.
PosTag pos_tag(std::string_view word, TokenContext context = {},
               const Lexicon& lexicon = Lexicon::builtin());

// Every tag the word may take: all lexicon tags, or the single heuristic tag.
std::vector<PosTag> pos_candidates(std::string_view word,
                                   const Lexicon& lexicon = Lexicon::builtin());

std::string to_gerund(std::string_view verb);
std::string pluralize(std::string_view noun);
std::string_view indefinite_article(std::string_view word);

struct CandidateSentence {
  std::string text;
  int template_index = 0;
  int variant_index = 0;
  std::optional<double> perplexity;
};

// Grammatical variants of `sentence` around the first occurrence of
// `subject`. The unmodified sentence is always variant 0. Rules:
//   1. noun/adjective head (or verb followed by noun/adjective): a/an, the
//   2. infinitive verb head: gerund
//   3. number head: pluralize the following subject word
//   4. singular/plural swap of the verb right after the subject
std::vector<CandidateSentence> expand_grammar(
    std::string_view sentence, std::string_view subject,
    const Lexicon& lexicon = Lexicon::builtin());

}  // namespace lmprobe
