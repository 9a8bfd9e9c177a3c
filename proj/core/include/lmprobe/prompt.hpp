#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmprobe/grammar.hpp"
#include "lmprobe/kb.hpp"
#include "lmprobe/scorer.hpp"
#include "lmprobe/templates.hpp"

namespace lmprobe {

// Substitutes the subject and object into an original template and
// normalizes whitespace. Throws TemplateError when a placeholder is missing.
std::string instantiate(std::string_view tmpl, std::string_view subject,
                        std::string_view object_or_mask);

// "which is the opposite of frequent". Throws ConfigError when the relation
// has no relative clause.
std::string relative_clause(Relation relation, std::string_view object,
                            const TemplateSet& templates);

// The clause with "which" replaced by the subject:
// "rare is the opposite of frequent".
std::string relation_statement(Relation relation, std::string_view subject,
                               std::string_view object,
                               const TemplateSet& templates);

struct MaskedPrompt {
  std::string text;  // contains the scorer's mask token exactly once
  std::string subject;
  Relation relation{};
  std::vector<std::string> answers;
  int chosen_template = 0;
  int chosen_variant = 0;
  double perplexity = 0.0;
  // Every scored grammatical variant, in (template, variant) order.
  std::vector<CandidateSentence> candidates;
  // Per usable template: its stage-one winner with the mask inserted.
  std::vector<CandidateSentence> template_winners;
};

struct PromptOptions {
  // Fills the object slot while ranking candidates by perplexity.
  std::string filler = "thing";
};

// Templates usable with `caps`: all of them when the scorer can fill a mask
// anywhere, otherwise only those ending in [[OBJ]].
std::vector<int> usable_templates(const RelationTemplate& tmpl,
                                  const ScorerCapabilities& caps);

// Two-stage minimum-perplexity selection: the best grammatical variant per
// template, then the best template. Ties go to the lower (template, variant)
// index.
MaskedPrompt select_masked_prompt(const ProbeQuery& query,
                                  const TemplateSet& templates,
                                  const Scorer& scorer,
                                  const PromptOptions& options = {});

}  // namespace lmprobe
