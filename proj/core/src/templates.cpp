#include "lmprobe/templates.hpp"

#include <nlohmann/json.hpp>

#include "lmprobe/error.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

namespace detail {
extern const std::string_view kTemplatesJson;
}

using nlohmann::json;

bool RelationTemplate::object_at_end(std::size_t index) const {
  const auto& t = originals.at(index);
  auto pos = t.find(kObjectSlot);
  if (pos == std::string::npos) return false;
  for (const auto& tok :
       split_whitespace(std::string_view(t).substr(pos + kObjectSlot.size())))
    if (!is_punctuation_token(tok)) return false;
  return true;
}

void validate(const RelationTemplate& t) {
  const std::string name(relation_name(t.relation));
  if (t.originals.empty())
    throw TemplateError(name + ": at least one original template required");
  for (const auto& o : t.originals) {
    if (count_occurrences(o, kSubjectSlot) != 1 ||
        count_occurrences(o, kObjectSlot) != 1)
      throw TemplateError(name + ": template must contain [[SUBJ]] and [[OBJ]] once: " + o);
  }
  if (!t.relative_clause.empty()) {
    if (count_occurrences(t.relative_clause, kObjectSlot) != 1)
      throw TemplateError(name + ": relative clause must contain [[OBJ]] once");
    if (!t.relative_clause.starts_with("which "))
      throw TemplateError(name + ": relative clause must start with \"which\"");
  }
}

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet set = parse(detail::kTemplatesJson);
  return set;
}

TemplateSet TemplateSet::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("template file: ") + e.what());
  }
  if (!doc.contains("relations") || !doc["relations"].is_object())
    throw ParseError("template file: missing object \"relations\"");

  TemplateSet set;
  for (const auto& [name, entry] : doc["relations"].items()) {
    auto rel = parse_relation(name);
    if (!rel) throw ConfigError("template file: unknown relation " + name);
    RelationTemplate t;
    t.relation = *rel;
    try {
      for (const auto& o : entry.at("originals"))
        t.originals.push_back(o.get<std::string>());
      if (entry.contains("relative_clause"))
        t.relative_clause = entry["relative_clause"].get<std::string>();
    } catch (const json::exception& e) {
      throw ParseError("template file: relations." + name + ": " + e.what());
    }
    set.add(std::move(t));
  }
  return set;
}

TemplateSet TemplateSet::load(const std::string& path) {
  return parse(read_file(path));
}

void TemplateSet::add(RelationTemplate t) {
  validate(t);
  auto r = t.relation;
  table_.insert_or_assign(r, std::move(t));
}

const RelationTemplate* TemplateSet::find(Relation r) const {
  auto it = table_.find(r);
  return it == table_.end() ? nullptr : &it->second;
}

const RelationTemplate& TemplateSet::at(Relation r) const {
  if (const auto* t = find(r)) return *t;
  throw ConfigError("no templates for relation " + std::string(relation_name(r)));
}

std::string TemplateSet::to_json() const {
  json rels = json::object();
  for (const auto& [r, t] : table_) {
    json entry;
    entry["originals"] = t.originals;
    if (!t.relative_clause.empty()) entry["relative_clause"] = t.relative_clause;
    rels[std::string(relation_name(r))] = std::move(entry);
  }
  return json{{"relations", std::move(rels)}}.dump(2);
}

}  // namespace lmprobe
