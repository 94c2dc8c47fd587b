#include "qx/serialize.hpp"

#include <string>

#include "qx/error.hpp"

namespace qx {

using nlohmann::json;

void to_json(json& j, const Token& t) {
  j = json{{"text", t.text},
           {"char_start", t.char_start},
           {"char_end", t.char_end},
           {"word_index", t.word_index}};
}

void from_json(const json& j, Token& t) {
  j.at("text").get_to(t.text);
  j.at("char_start").get_to(t.char_start);
  j.at("char_end").get_to(t.char_end);
  j.at("word_index").get_to(t.word_index);
}

void to_json(json& j, BioTag t) { j = std::string(to_string(t)); }

void from_json(const json& j, BioTag& t) {
  t = bio_tag_from_string(j.get<std::string>());
}

void to_json(json& j, const TagSequence& s) {
  j = json{{"tags", s.tags},
           {"level", s.level == TagLevel::word ? "word" : "subtoken"}};
}

void from_json(const json& j, TagSequence& s) {
  j.at("tags").get_to(s.tags);
  const auto level = j.at("level").get<std::string>();
  if (level == "word") {
    s.level = TagLevel::word;
  } else if (level == "subtoken") {
    s.level = TagLevel::subtoken;
  } else {
    throw ParseError(0, "invalid tag level \"" + level + "\"");
  }
}

void to_json(json& j, const QuestionSpan& s) {
  j = json{{"start_word", s.start_word},
           {"end_word", s.end_word},
           {"text", s.text}};
}

void from_json(const json& j, QuestionSpan& s) {
  j.at("start_word").get_to(s.start_word);
  j.at("end_word").get_to(s.end_word);
  j.at("text").get_to(s.text);
}

void to_json(json& j, const AnnotatedExample& e) {
  j = json{{"id", e.id},
           {"text", e.text},
           {"spans", e.spans},
           {"source", std::string(to_string(e.source))}};
}

void from_json(const json& j, AnnotatedExample& e) {
  j.at("id").get_to(e.id);
  j.at("text").get_to(e.text);
  j.at("spans").get_to(e.spans);
  const auto source = j.at("source").get<std::string>();
  auto parsed = parse_example_source(source);
  if (!parsed) throw ParseError(0, "invalid example source \"" + source + "\"");
  e.source = *parsed;
}

void to_json(json& j, const Alignment& a) {
  j = json::array();
  for (const auto& r : a.word_to_subtokens) j.push_back({r.begin, r.end});
}

void from_json(const json& j, Alignment& a) {
  a.word_to_subtokens.clear();
  for (const auto& r : j) {
    a.word_to_subtokens.push_back(
        {r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>()});
  }
}

}  // namespace qx
