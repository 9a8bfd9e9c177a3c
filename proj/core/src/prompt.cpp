#include "lmprobe/prompt.hpp"

#include "lmprobe/error.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

std::string instantiate(std::string_view tmpl, std::string_view subject,
                        std::string_view object_or_mask) {
  if (tmpl.find(kSubjectSlot) == std::string_view::npos ||
      tmpl.find(kObjectSlot) == std::string_view::npos)
    throw TemplateError("template lacks [[SUBJ]] or [[OBJ]]: " + std::string(tmpl));
  // Object first: a subject containing the literal [[OBJ]] must not be rewritten.
  auto s = replace_all(tmpl, kObjectSlot, "\x01");
  s = replace_all(s, kSubjectSlot, subject);
  s = replace_all(s, "\x01", object_or_mask);
  return collapse_whitespace(s);
}

std::string relative_clause(Relation relation, std::string_view object,
                            const TemplateSet& templates) {
  const auto* t = templates.find(relation);
  if (!t || t->relative_clause.empty())
    throw ConfigError("no relative clause template for " +
                      std::string(relation_name(relation)));
  return collapse_whitespace(replace_all(t->relative_clause, kObjectSlot, object));
}

std::string relation_statement(Relation relation, std::string_view subject,
                               std::string_view object,
                               const TemplateSet& templates) {
  auto clause = relative_clause(relation, object, templates);
  constexpr std::string_view kPronoun = "which";
  return std::string(subject) + clause.substr(kPronoun.size());
}

std::vector<int> usable_templates(const RelationTemplate& tmpl,
                                  const ScorerCapabilities& caps) {
  std::vector<int> out;
  for (std::size_t i = 0; i < tmpl.originals.size(); ++i)
    if (caps.mask_anywhere || tmpl.object_at_end(i)) out.push_back(static_cast<int>(i));
  return out;
}

MaskedPrompt select_masked_prompt(const ProbeQuery& query,
                                  const TemplateSet& templates,
                                  const Scorer& scorer,
                                  const PromptOptions& options) {
  const auto& tmpl = templates.at(query.relation);
  const auto caps = scorer.capabilities();
  const auto usable = usable_templates(tmpl, caps);
  if (usable.empty())
    throw CapabilityError("no template of " + std::string(relation_name(query.relation)) +
                          " ends with [[OBJ]], required by " + caps.model_name);

  MaskedPrompt result;
  result.subject = query.subject;
  result.relation = query.relation;
  result.answers = query.answers;

  const CandidateSentence* best = nullptr;
  std::vector<std::size_t> winner_index;
  for (int ti : usable) {
    const auto raw = instantiate(tmpl.originals[static_cast<std::size_t>(ti)],
                                 query.subject, kObjectSlot);
    auto variants = expand_grammar(raw, query.subject);
    std::size_t stage_one = result.candidates.size();
    for (auto& v : variants) {
      v.template_index = ti;
      v.perplexity = scorer.perplexity(replace_all(v.text, kObjectSlot, options.filler));
      result.candidates.push_back(std::move(v));
      auto& added = result.candidates.back();
      if (*added.perplexity < *result.candidates[stage_one].perplexity)
        stage_one = result.candidates.size() - 1;
    }
    winner_index.push_back(stage_one);
  }

  for (auto idx : winner_index) {
    const auto& c = result.candidates[idx];
    if (!best || *c.perplexity < *best->perplexity) best = &c;
    auto masked = c;
    masked.text = replace_all(c.text, kObjectSlot, caps.mask_token);
    result.template_winners.push_back(std::move(masked));
  }

  result.text = replace_all(best->text, kObjectSlot, caps.mask_token);
  result.chosen_template = best->template_index;
  result.chosen_variant = best->variant_index;
  result.perplexity = *best->perplexity;
  return result;
}

}  // namespace lmprobe
