#include "qx/io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "qx/error.hpp"
#include "qx/labels.hpp"
#include "qx/tokenize.hpp"

namespace qx {
namespace {

std::string where(std::size_t line) {
  return line > 0 ? "line " + std::to_string(line) + ": " : std::string{};
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

bool same_line(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double ca = a.center_y();
  const double cb = b.center_y();
  return (ca >= b.y0 && ca <= b.y1) || (cb >= a.y0 && cb <= a.y1);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

LinearizedText ocr_to_text(const std::vector<OcrWord>& words) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].text.empty()) {
      throw ContractViolation("OCR word " + std::to_string(i) + " has empty text");
    }
    if (!words[i].bbox.valid()) {
      throw ContractViolation("OCR word " + std::to_string(i) +
                              " has an invalid bbox (need x0<x1, y0<y1)");
    }
  }

  DisjointSets sets(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      if (words[i].page == words[j].page && same_line(words[i].bbox, words[j].bbox)) {
        sets.unite(i, j);
      }
    }
  }

  struct Line {
    std::size_t page;
    double top;
    double left;
    std::vector<std::size_t> members;
  };
  std::vector<Line> lines;
  std::vector<std::size_t> line_of_root(words.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::size_t root = sets.find(i);
    if (line_of_root[root] == static_cast<std::size_t>(-1)) {
      line_of_root[root] = lines.size();
      lines.push_back({words[i].page, words[i].bbox.y0, words[i].bbox.x0, {}});
    }
    auto& line = lines[line_of_root[root]];
    line.top = std::min(line.top, words[i].bbox.y0);
    line.left = std::min(line.left, words[i].bbox.x0);
    line.members.push_back(i);
  }
  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.page != b.page) return a.page < b.page;
    if (a.top != b.top) return a.top < b.top;
    return a.left < b.left;
  });

  LinearizedText out;
  out.provenance.resize(words.size());
  for (auto& line : lines) {
    std::stable_sort(line.members.begin(), line.members.end(),
                     [&](std::size_t a, std::size_t b) {
                       return words[a].bbox.x0 < words[b].bbox.x0;
                     });
    if (!out.text.empty()) out.text += '\n';
    for (std::size_t k = 0; k < line.members.size(); ++k) {
      if (k > 0) out.text += ' ';
      const auto& w = words[line.members[k]];
      out.provenance[line.members[k]] = {out.text.size(), out.text.size() + w.text.size()};
      out.text += w.text;
    }
  }
  return out;
}

std::vector<OcrWord> parse_ocr_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("pages") || !j["pages"].is_array()) {
    throw ParseError(0, "OCR JSON: expected an object with a \"pages\" array");
  }
  std::vector<OcrWord> out;
  const auto& pages = j["pages"];
  for (std::size_t p = 0; p < pages.size(); ++p) {
    const auto& page = pages[p];
    const std::string at = "pages[" + std::to_string(p) + "]";
    if (!page.is_object() || !page.contains("words") || !page["words"].is_array()) {
      throw ParseError(0, "OCR JSON: " + at + " needs a \"words\" array");
    }
    const auto& ws = page["words"];
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const auto& w = ws[i];
      const std::string wat = at + ".words[" + std::to_string(i) + "]";
      if (!w.is_object() || !w.contains("text") || !w["text"].is_string() ||
          !w.contains("bbox") || !w["bbox"].is_array() || w["bbox"].size() != 4) {
        throw ParseError(0, "OCR JSON: " + wat +
                                " needs \"text\" and a 4-element \"bbox\"");
      }
      OcrWord word;
      word.text = w["text"].get<std::string>();
      word.page = p;
      const auto& b = w["bbox"];
      for (const auto& v : b) {
        if (!v.is_number()) throw ParseError(0, "OCR JSON: " + wat + " bbox must be numeric");
      }
      word.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                   b[3].get<double>()};
      if (word.text.empty()) throw ParseError(0, "OCR JSON: " + wat + " has empty text");
      if (!word.bbox.valid()) {
        throw ParseError(0, "OCR JSON: " + wat + " bbox needs x0<x1 and y0<y1");
      }
      out.push_back(std::move(word));
    }
  }
  return out;
}

std::vector<OcrWord> load_ocr_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(0, path.string() + ": invalid JSON");
  return parse_ocr_json(j);
}

DatasetFormat parse_dataset_format(std::string_view s) {
  if (s == "jsonl") return DatasetFormat::jsonl;
  if (s == "conll") return DatasetFormat::conll;
  throw ContractViolation("unknown dataset format \"" + std::string(s) +
                          "\" (expected jsonl or conll)");
}

std::string_view to_string(DatasetFormat format) noexcept {
  return format == DatasetFormat::jsonl ? "jsonl" : "conll";
}

nlohmann::ordered_json example_to_jsonl(const AnnotatedExample& example) {
  const auto words = word_tokenize(example.text);
  nlohmann::ordered_json spans = nlohmann::ordered_json::array();
  for (const auto& s : example.spans) {
    if (s.end_word >= words.size() || s.start_word > s.end_word) {
      throw ContractViolation("example \"" + example.id +
                              "\": span outside the text's words");
    }
    spans.push_back({words[s.start_word].char_start, words[s.end_word].char_end});
  }
  nlohmann::ordered_json j;
  j["id"] = example.id;
  j["text"] = example.text;
  j["spans"] = std::move(spans);
  j["source"] = std::string(to_string(example.source));
  return j;
}

AnnotatedExample example_from_jsonl(const nlohmann::json& j, std::size_t line) {
  const std::string at = where(line);
  if (!j.is_object()) throw ParseError(line, at + "record is not a JSON object");
  auto require_string = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
      throw ParseError(line, at + "missing string field \"" + key + "\"");
    }
    return j[key].get<std::string>();
  };

  AnnotatedExample ex;
  ex.id = require_string("id");
  ex.text = require_string("text");
  if (j.contains("source")) {
    const auto source = require_string("source");
    auto parsed = parse_example_source(source);
    if (!parsed) throw ParseError(line, at + "unknown source \"" + source + "\"");
    ex.source = *parsed;
  }
  if (!j.contains("spans") || !j["spans"].is_array()) {
    throw ParseError(line, at + "missing \"spans\" array");
  }

  const auto words = word_tokenize(ex.text);
  for (const auto& pair : j["spans"]) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
        !pair[1].is_number_unsigned()) {
      throw ParseError(line, at + "record \"" + ex.id +
                                 "\": spans must be [char_start, char_end] pairs");
    }
    const auto cs = pair[0].get<std::size_t>();
    const auto ce = pair[1].get<std::size_t>();
    auto first = std::find_if(words.begin(), words.end(),
                              [&](const Token& w) { return w.char_start == cs; });
    auto last = std::find_if(words.begin(), words.end(),
                             [&](const Token& w) { return w.char_end == ce; });
    if (first == words.end() || last == words.end() || last < first) {
      throw ParseError(line, at + "record \"" + ex.id + "\": span [" +
                                 std::to_string(cs) + ", " + std::to_string(ce) +
                                 ") is not aligned to word boundaries");
    }
    const auto s = static_cast<std::size_t>(first - words.begin());
    const auto e = static_cast<std::size_t>(last - words.begin());
    ex.spans.push_back({s, e, span_text(ex.text, words, s, e)});
  }
  if (auto problems = validate_span_list(ex.spans); !problems.empty()) {
    throw ParseError(line, at + "record \"" + ex.id + "\": " + problems.front());
  }
  return ex;
}

std::string example_to_conll(const AnnotatedExample& example) {
  const auto words = word_tokenize(example.text);
  const auto tags = encode_tags(example.spans, words.size());
  std::string out = "# id = " + example.id + "\n# source = " +
                    std::string(to_string(example.source)) + "\n";
  for (std::size_t i = 0; i < words.size(); ++i) {
    out += words[i].text;
    out += '\t';
    out += to_string(tags.tags[i]);
    out += '\n';
  }
  out += '\n';
  return out;
}

void read_jsonl(std::istream& in,
                const std::function<void(AnnotatedExample)>& sink) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(line_no, where(line_no) + "invalid JSON");
    sink(example_from_jsonl(j, line_no));
  }
}

void read_conll(std::istream& in,
                const std::function<void(AnnotatedExample)>& sink) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t doc_count = 0;

  bool open = false;
  std::size_t doc_line = 0;
  AnnotatedExample ex;
  std::vector<BioTag> tags;

  auto flush = [&] {
    if (!open) return;
    if (ex.id.empty()) ex.id = "doc-" + std::to_string(doc_count + 1);
    TagSequence seq{std::move(tags), TagLevel::word};
    try {
      ex.spans = decode_spans(seq, RepairPolicy::strict);
    } catch (const MalformedTags& e) {
      throw ParseError(doc_line + e.index(),
                       where(doc_line + e.index()) + "document \"" + ex.id + "\": " + e.what());
    }
    attach_text(ex.spans, ex.text, word_tokenize(ex.text));
    sink(std::move(ex));
    ++doc_count;
    ex = AnnotatedExample{};
    tags.clear();
    open = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#' && line.find('\t') == std::string::npos) {
      if (!tags.empty()) flush();
      open = true;
      if (line.rfind("# id = ", 0) == 0) {
        ex.id = line.substr(7);
      } else if (line.rfind("# source = ", 0) == 0) {
        const auto source = line.substr(11);
        auto parsed = parse_example_source(source);
        if (!parsed) throw ParseError(line_no, where(line_no) + "unknown source \"" + source + "\"");
        ex.source = *parsed;
      }
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(line_no, where(line_no) + "expected \"<token>\\t<tag>\"");
    }
    auto tag = parse_bio_tag(std::string_view(line).substr(tab + 1));
    if (!tag) {
      throw ParseError(line_no, where(line_no) + "invalid tag \"" + line.substr(tab + 1) + "\"");
    }
    open = true;
    if (tags.empty()) doc_line = line_no;  // tag i sits on doc_line + i
    if (!ex.text.empty()) ex.text += ' ';
    ex.text.append(line, 0, tab);
    tags.push_back(*tag);
  }
  flush();
}

void write_example(std::ostream& out, const AnnotatedExample& example,
                   DatasetFormat format) {
  if (format == DatasetFormat::jsonl) {
    out << example_to_jsonl(example).dump(-1, ' ', false,
                                          nlohmann::json::error_handler_t::replace)
        << '\n';
  } else {
    out << example_to_conll(example);
  }
}

std::vector<AnnotatedExample> read_dataset(const std::filesystem::path& path,
                                           DatasetFormat format) {
  auto in = open_in(path);
  std::vector<AnnotatedExample> out;
  auto sink = [&](AnnotatedExample ex) { out.push_back(std::move(ex)); };
  try {
    if (format == DatasetFormat::jsonl) {
      read_jsonl(in, sink);
    } else {
      read_conll(in, sink);
    }
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
  return out;
}

void write_dataset(const std::vector<AnnotatedExample>& examples,
                   const std::filesystem::path& path, DatasetFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& ex : examples) write_example(out, ex, format);
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace qx
