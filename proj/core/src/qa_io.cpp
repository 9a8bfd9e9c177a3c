#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "lmprobe/error.hpp"
#include "lmprobe/qa.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

using nlohmann::json;

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  json parse(std::string_view text) const {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(source_ + ": " + e.what());
    }
  }

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ParseError(source_ + ": " + path + ": " + what);
  }

  const json& member(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing");
    return *it;
  }

  const json& array(const json& obj, const std::string& key, const std::string& path) const {
    const auto& v = member(obj, key, path);
    if (!v.is_array()) fail(path + "." + key, "expected an array");
    return v;
  }

  std::string string(const json& obj, const std::string& key, const std::string& path) const {
    const auto& v = member(obj, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
  }

  std::size_t index(const json& obj, const std::string& key, const std::string& path) const {
    const auto& v = member(obj, key, path);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      fail(path + "." + key, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

 private:
  std::string source_;
};

std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

}  // namespace

std::vector<QAExample> parse_squad(std::string_view json_text, const std::string& source) {
  Reader rd(source);
  const auto doc = rd.parse(json_text);
  std::vector<QAExample> out;
  const auto& data = rd.array(doc, "data", "$");
  for (std::size_t a = 0; a < data.size(); ++a) {
    const auto ap = at("$.data", a);
    const auto& article = data[a];
    std::string title;
    if (article.is_object() && article.contains("title") && article["title"].is_string())
      title = article["title"].get<std::string>();
    const auto& paragraphs = rd.array(article, "paragraphs", ap);
    for (std::size_t p = 0; p < paragraphs.size(); ++p) {
      const auto pp = at(ap + ".paragraphs", p);
      const auto context = rd.string(paragraphs[p], "context", pp);
      const auto& qas = rd.array(paragraphs[p], "qas", pp);
      for (std::size_t q = 0; q < qas.size(); ++q) {
        const auto qp = at(pp + ".qas", q);
        QAExample ex;
        ex.style = DatasetStyle::Squad;
        ex.title = title;
        ex.id = rd.string(qas[q], "id", qp);
        ex.question = rd.string(qas[q], "question", qp);
        ex.context = context;
        if (qas[q].contains("is_impossible")) {
          const auto& imp = qas[q]["is_impossible"];
          if (!imp.is_boolean()) rd.fail(qp + ".is_impossible", "expected a boolean");
          ex.is_impossible = imp.get<bool>();
        }
        const auto& answers = rd.array(qas[q], "answers", qp);
        for (std::size_t i = 0; i < answers.size(); ++i) {
          const auto ip = at(qp + ".answers", i);
          AnswerSpan span{rd.string(answers[i], "text", ip), rd.index(answers[i], "answer_start", ip)};
          if (span.start + span.text.size() > context.size() ||
              context.compare(span.start, span.text.size(), span.text) != 0)
            rd.fail(ip, "answer text not found at answer_start");
          ex.gold_answers.push_back(span.text);
          ex.answer_spans.push_back(std::move(span));
        }
        if (ex.is_impossible && !ex.gold_answers.empty())
          rd.fail(qp, "is_impossible question with answers");
        out.push_back(std::move(ex));
      }
    }
  }
  return out;
}

std::vector<QAExample> read_squad(const std::string& path) {
  return parse_squad(read_file(path), path);
}

std::vector<QAExample> parse_record(std::string_view json_text, const std::string& source) {
  Reader rd(source);
  const auto doc = rd.parse(json_text);
  std::vector<QAExample> out;
  const auto& data = rd.array(doc, "data", "$");
  for (std::size_t d = 0; d < data.size(); ++d) {
    const auto dp = at("$.data", d);
    const auto& item = data[d];
    const auto& passage = rd.member(item, "passage", dp);
    const auto text = rd.string(passage, "text", dp + ".passage");
    std::vector<EntitySpan> entities;
    const auto& ents = rd.array(passage, "entities", dp + ".passage");
    for (std::size_t e = 0; e < ents.size(); ++e) {
      const auto ep = at(dp + ".passage.entities", e);
      EntitySpan span{rd.index(ents[e], "start", ep), rd.index(ents[e], "end", ep)};
      if (span.end < span.start || span.end >= text.size()) rd.fail(ep, "entity span out of range");
      entities.push_back(span);
    }
    std::string passage_id;
    if (item.contains("id") && item["id"].is_string()) passage_id = item["id"].get<std::string>();
    const auto& qas = rd.array(item, "qas", dp);
    for (std::size_t q = 0; q < qas.size(); ++q) {
      const auto qp = at(dp + ".qas", q);
      QAExample ex;
      ex.style = DatasetStyle::Record;
      ex.title = passage_id;
      ex.id = rd.string(qas[q], "id", qp);
      ex.question = rd.string(qas[q], "query", qp);
      ex.context = text;
      ex.entities = entities;
      if (qas[q].contains("answers")) {
        const auto& answers = rd.array(qas[q], "answers", qp);
        for (std::size_t i = 0; i < answers.size(); ++i) {
          const auto ip = at(qp + ".answers", i);
          const auto start = rd.index(answers[i], "start", ip);
          const auto end = rd.index(answers[i], "end", ip);
          auto ans = rd.string(answers[i], "text", ip);
          if (end < start || end >= text.size() || text.compare(start, end - start + 1, ans) != 0)
            rd.fail(ip, "answer text does not match its span");
          ex.gold_answers.push_back(ans);
          ex.answer_spans.push_back({std::move(ans), start});
        }
      }
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<QAExample> read_record(const std::string& path) {
  return parse_record(read_file(path), path);
}

std::string format_dataset(std::span<const QAExample> examples, DatasetStyle style) {
  json data = json::array();
  if (style == DatasetStyle::Squad) {
    for (const auto& ex : examples) {
      json answers = json::array();
      for (const auto& s : ex.answer_spans)
        answers.push_back({{"answer_start", s.start}, {"text", s.text}});
      json qa = {{"answers", answers}, {"id", ex.id}, {"question", ex.question}};
      if (ex.is_impossible) qa["is_impossible"] = true;
      else qa["is_impossible"] = false;
      json paragraph = {{"context", ex.context}, {"qas", json::array({qa})}};
      if (data.empty() || data.back()["title"] != ex.title)
        data.push_back({{"paragraphs", json::array()}, {"title", ex.title}});
      data.back()["paragraphs"].push_back(std::move(paragraph));
    }
    return json{{"data", data}, {"version", "v2.0"}}.dump(1) + "\n";
  }
  for (const auto& ex : examples) {
    json entities = json::array();
    for (const auto& e : ex.entities) entities.push_back({{"end", e.end}, {"start", e.start}});
    json answers = json::array();
    for (const auto& s : ex.answer_spans)
      answers.push_back({{"end", s.start + s.text.size() - 1}, {"start", s.start}, {"text", s.text}});
    data.push_back({{"id", ex.title},
                    {"passage", {{"entities", entities}, {"text", ex.context}}},
                    {"qas", json::array({{{"answers", answers}, {"id", ex.id}, {"query", ex.question}}})}});
  }
  return json{{"data", data}, {"version", "v1.0"}}.dump(1) + "\n";
}

std::map<std::string, std::string> read_predictions(const std::string& path) {
  Reader rd(path);
  const auto doc = rd.parse(read_file(path));
  if (!doc.is_object()) rd.fail("$", "expected an object of id -> answer");
  std::map<std::string, std::string> out;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_string()) rd.fail("$." + it.key(), "expected a string");
    out.emplace(it.key(), it.value().get<std::string>());
  }
  return out;
}

std::map<std::string, std::vector<std::string>> read_type_labels(const std::string& path) {
  static const std::vector<std::string> kKnown{"synonymy", "commonsense", "no_semantic_variation",
                                               "multi_sentence", "typo", "others"};
  Reader rd(path);
  const auto doc = rd.parse(read_file(path));
  if (!doc.is_object()) rd.fail("$", "expected an object of id -> labels");
  std::map<std::string, std::vector<std::string>> out;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto p = "$." + it.key();
    std::vector<std::string> labels;
    if (it.value().is_string()) {
      labels.push_back(it.value().get<std::string>());
    } else if (it.value().is_array()) {
      for (std::size_t i = 0; i < it.value().size(); ++i) {
        if (!it.value()[i].is_string()) rd.fail(at(p, i), "expected a string");
        labels.push_back(it.value()[i].get<std::string>());
      }
    } else {
      rd.fail(p, "expected a label or a list of labels");
    }
    for (const auto& l : labels)
      if (std::find(kKnown.begin(), kKnown.end(), l) == kKnown.end())
        rd.fail(p, "unknown question type '" + l + "'");
    out.emplace(it.key(), std::move(labels));
  }
  return out;
}

std::map<std::string, std::vector<Triple>> read_example_triples(const std::string& path) {
  std::map<std::string, std::vector<Triple>> out;
  std::size_t line_no = 0;
  for (auto line : split(read_file(path), '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto where = path + ":" + std::to_string(line_no);
    auto f = split(line, '\t');
    if (f.size() != 4) throw ParseError(where + ": expected id, subject, relation, object");
    auto rel = parse_relation(collapse_whitespace(f[2]));
    if (!rel) throw ParseError(where + ": unknown relation '" + f[2] + "'");
    auto subject = normalize_phrase(f[1]);
    auto object = normalize_phrase(f[3]);
    if (subject.empty() || object.empty()) throw ParseError(where + ": empty subject or object");
    out[collapse_whitespace(f[0])].push_back({std::move(subject), *rel, std::move(object)});
  }
  return out;
}

}  // namespace lmprobe
