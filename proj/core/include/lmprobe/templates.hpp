#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmprobe/kb.hpp"

namespace lmprobe {

inline constexpr std::string_view kSubjectSlot = "[[SUBJ]]";
inline constexpr std::string_view kObjectSlot = "[[OBJ]]";

struct RelationTemplate {
  Relation relation{};
  // Each contains [[SUBJ]] and [[OBJ]] exactly once.
  std::vector<std::string> originals;
  // "which ... [[OBJ]]"; empty when the relation has no clause form.
  std::string relative_clause;

  // True when nothing but punctuation follows [[OBJ]] in original `index`.
  bool object_at_end(std::size_t index) const;
};

class TemplateSet {
 public:
  // The bundled table (32 relations).
  static const TemplateSet& builtin();

  // {"relations": {"MadeOf": {"originals": [...], "relative_clause": "..."}}}
  static TemplateSet parse(std::string_view json_text);
  static TemplateSet load(const std::string& path);

  void add(RelationTemplate t);

  const RelationTemplate* find(Relation r) const;
  // Throws ConfigError when the relation has no templates.
  const RelationTemplate& at(Relation r) const;

  std::size_t size() const { return table_.size(); }
  std::string to_json() const;

 private:
  std::map<Relation, RelationTemplate> table_;
};

// Throws TemplateError when an invariant of `t` does not hold.
void validate(const RelationTemplate& t);

}  // namespace lmprobe
