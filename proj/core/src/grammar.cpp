#include "lmprobe/grammar.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "lmprobe/error.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

namespace detail {
extern const std::string_view kLexiconTsv;
}

namespace {

bool has(const std::vector<PosTag>& tags, PosTag t) {
  return std::find(tags.begin(), tags.end(), t) != tags.end();
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool is_digit_word(std::string_view w) {
  if (w.empty() || !(w[0] >= '0' && w[0] <= '9')) return false;
  return std::all_of(w.begin(), w.end(), [](char c) {
    return (c >= '0' && c <= '9') || c == ',' || c == '.';
  });
}

std::optional<PosTag> parse_tag(std::string_view s) {
  if (s == "noun") return PosTag::Noun;
  if (s == "verb") return PosTag::Verb;
  if (s == "adjective") return PosTag::Adjective;
  if (s == "number") return PosTag::Number;
  if (s == "other") return PosTag::Other;
  return std::nullopt;
}

PosTag suffix_tag(std::string_view w) {
  if (is_digit_word(w)) return PosTag::Number;
  if (w.size() > 3 && (w.ends_with("ly") || w.ends_with("wards")))
    return PosTag::Other;
  for (std::string_view suf : {"ous", "ful", "ive", "less", "able", "ible"})
    if (w.size() > suf.size() + 1 && w.ends_with(suf)) return PosTag::Adjective;
  return PosTag::Noun;
}

// Singular <-> plural forms of auxiliaries and the copula.
constexpr std::array<std::pair<std::string_view, std::string_view>, 8> kAgreement = {{
    {"is", "are"}, {"are", "is"}, {"was", "were"}, {"were", "was"},
    {"has", "have"}, {"have", "has"}, {"does", "do"}, {"do", "does"},
}};

std::string third_person(std::string_view base) {
  if (base.size() >= 2 && base.back() == 'o' && !is_vowel(base[base.size() - 2]))
    return std::string(base) + "es";
  return pluralize(base);
}

std::optional<std::string> agreement_swap(std::string_view token,
                                          const Lexicon& lex) {
  const auto lower = to_lower(token);
  for (const auto& [a, b] : kAgreement)
    if (lower == a) return std::string(b);
  const auto* e = lex.find(lower);
  if (!e || !has(e->tags, PosTag::Verb)) return std::nullopt;
  if (!e->lemma.empty()) {
    if (third_person(e->lemma) == lower) return e->lemma;
    return std::nullopt;
  }
  // Base form used as a plural verb: offer the third-person singular.
  if (e->tags.front() == PosTag::Verb) return third_person(lower);
  return std::nullopt;
}

bool tokens_equal_ci(const std::vector<std::string>& a, std::size_t at,
                     const std::vector<std::string>& b) {
  if (at + b.size() > a.size()) return false;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (to_lower(a[at + i]) != to_lower(b[i])) return false;
  return true;
}

}  // namespace

std::string_view pos_name(PosTag tag) {
  switch (tag) {
    case PosTag::Noun: return "noun";
    case PosTag::Verb: return "verb";
    case PosTag::Adjective: return "adjective";
    case PosTag::Number: return "number";
    case PosTag::Other: return "other";
  }
  return "other";
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = parse(detail::kLexiconTsv);
  return lex;
}

Lexicon Lexicon::parse(std::string_view tsv) {
  Lexicon lex;
  std::size_t line_no = 0;
  for (const auto& line : split(tsv, '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() < 2 || fields[0].empty())
      throw ParseError("lexicon line " + std::to_string(line_no) + ": malformed");
    Entry e;
    for (const auto& t : split(fields[1], ',')) {
      auto tag = parse_tag(t);
      if (!tag)
        throw ParseError("lexicon line " + std::to_string(line_no) +
                         ": unknown tag " + t);
      e.tags.push_back(*tag);
    }
    if (fields.size() > 2) e.lemma = fields[2];
    lex.entries_.insert_or_assign(to_lower(fields[0]), std::move(e));
  }
  return lex;
}

const Lexicon::Entry* Lexicon::find(std::string_view word) const {
  auto it = entries_.find(to_lower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

PosTag pos_tag(std::string_view word, TokenContext context,
               const Lexicon& lexicon) {
  if (word.empty()) throw ContractError("pos_tag: empty word");
  const auto* e = lexicon.find(word);
  if (!e) return suffix_tag(to_lower(word));

  const auto prev = to_lower(context.previous);
  if (prev == "to" && has(e->tags, PosTag::Verb)) return PosTag::Verb;
  if (prev == "a" || prev == "an" || prev == "the") {
    for (auto t : e->tags)
      if (t == PosTag::Noun || t == PosTag::Adjective) return t;
  }
  return e->tags.front();
}

std::vector<PosTag> pos_candidates(std::string_view word,
                                   const Lexicon& lexicon) {
  if (const auto* e = lexicon.find(word)) return e->tags;
  return {suffix_tag(to_lower(word))};
}

std::string to_gerund(std::string_view verb) {
  std::string v = to_lower(verb);
  if (v.empty()) return v;
  if (v == "be") return "being";
  if (v.size() > 2 && v.ends_with("ie")) return v.substr(0, v.size() - 2) + "ying";
  if (v.size() > 2 && v.back() == 'e' && !v.ends_with("ee") &&
      !v.ends_with("ye") && !v.ends_with("oe"))
    return v.substr(0, v.size() - 1) + "ing";

  // Double the final consonant of a one-syllable consonant-vowel-consonant word.
  const auto n = v.size();
  if (n >= 3) {
    char c3 = v[n - 1], c2 = v[n - 2], c1 = v[n - 3];
    int vowel_groups = 0;
    bool in_vowel = false;
    for (char c : v) {
      bool vw = is_vowel(c);
      if (vw && !in_vowel) ++vowel_groups;
      in_vowel = vw;
    }
    if (vowel_groups == 1 && !is_vowel(c3) && is_vowel(c2) && !is_vowel(c1) &&
        c3 != 'w' && c3 != 'x' && c3 != 'y')
      return v + c3 + "ing";
  }
  return v + "ing";
}

std::string pluralize(std::string_view noun) {
  std::string n(noun);
  if (n.empty()) return n;
  const std::string lower = to_lower(n);
  if (lower.ends_with("s") || lower.ends_with("x") || lower.ends_with("z") ||
      lower.ends_with("ch") || lower.ends_with("sh"))
    return n + "es";
  if (lower.size() >= 2 && lower.back() == 'y' && !is_vowel(lower[lower.size() - 2]))
    return n.substr(0, n.size() - 1) + "ies";
  return n + "s";
}

std::string_view indefinite_article(std::string_view word) {
  const auto w = to_lower(word);
  if (w.empty()) return "a";
  for (std::string_view p : {"hour", "honest", "honor", "honour", "heir"})
    if (w.starts_with(p)) return "an";
  for (std::string_view p : {"uni", "use", "usu", "uti", "eu", "one", "once", "ur"})
    if (w.starts_with(p)) return "a";
  return is_vowel(w[0]) ? "an" : "a";
}

std::vector<CandidateSentence> expand_grammar(std::string_view sentence,
                                              std::string_view subject,
                                              const Lexicon& lexicon) {
  std::vector<CandidateSentence> out;
  out.push_back({std::string(sentence), 0, 0, std::nullopt});

  const auto tokens = split_whitespace(sentence);
  const auto subj = split_whitespace(subject);
  if (subj.empty()) return out;

  std::size_t at = tokens.size();
  for (std::size_t i = 0; i + subj.size() <= tokens.size(); ++i)
    if (tokens_equal_ci(tokens, i, subj)) {
      at = i;
      break;
    }
  if (at == tokens.size()) return out;

  const auto first_tags = pos_candidates(subj[0], lexicon);
  std::vector<PosTag> second_tags;
  if (subj.size() > 1) second_tags = pos_candidates(subj[1], lexicon);

  std::vector<std::vector<std::string>> forms{subj};

  const bool nominal_head = has(first_tags, PosTag::Noun) || has(first_tags, PosTag::Adjective);
  const bool verb_then_nominal =
      has(first_tags, PosTag::Verb) &&
      (has(second_tags, PosTag::Noun) || has(second_tags, PosTag::Adjective));
  if (nominal_head || verb_then_nominal) {
    for (std::string_view art : {indefinite_article(subj[0]), std::string_view("the")}) {
      auto f = subj;
      f.insert(f.begin(), std::string(art));
      forms.push_back(std::move(f));
    }
  }

  if (const auto* e = lexicon.find(subj[0]);
      e && has(e->tags, PosTag::Verb) && e->lemma.empty()) {
    auto f = subj;
    f[0] = to_gerund(subj[0]);
    forms.push_back(std::move(f));
  }

  if (has(first_tags, PosTag::Number) && subj.size() > 1) {
    const auto head = to_lower(subj[0]);
    if (head != "one" && head != "1") {
      auto f = subj;
      f[1] = pluralize(subj[1]);
      forms.push_back(std::move(f));
    }
  }

  const std::size_t after = at + subj.size();
  std::optional<std::string> swapped;
  if (after < tokens.size() && tokens[after].find("[[") == std::string::npos)
    swapped = agreement_swap(tokens[after], lexicon);

  std::set<std::string> seen{out.front().text};
  auto emit = [&](const std::vector<std::string>& form,
                  const std::optional<std::string>& verb) {
    std::vector<std::string> t(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(at));
    t.insert(t.end(), form.begin(), form.end());
    for (std::size_t i = after; i < tokens.size(); ++i)
      t.push_back(i == after && verb ? *verb : tokens[i]);
    auto text = join(t, " ");
    if (seen.insert(text).second)
      out.push_back({std::move(text), 0, static_cast<int>(out.size()), std::nullopt});
  };

  for (const auto& f : forms) {
    emit(f, std::nullopt);
    if (swapped) emit(f, swapped);
  }
  return out;
}

}  // namespace lmprobe
