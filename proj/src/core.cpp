#include "atoss/core.hpp"

#include <fstream>
#include <sstream>

#include "atoss/text.hpp"

namespace atoss::core {

namespace {
constexpr std::string_view kSeparator = "####";
}

Task task_from_string(std::string_view name) {
  std::string n = text::lower(name);
  if (n == "asqp") return Task::ASQP;
  if (n == "acos") return Task::ACOS;
  if (n == "tasd") return Task::TASD;
  if (n == "aste") return Task::ASTE;
  throw ConfigInvalid("unknown task: " + std::string(name));
}

std::string to_string(Task t) {
  switch (t) {
    case Task::ASQP: return "ASQP";
    case Task::ACOS: return "ACOS";
    case Task::TASD: return "TASD";
    case Task::ASTE: return "ASTE";
  }
  return "ASQP";
}

bool is_quad_task(Task t) { return t == Task::ASQP || t == Task::ACOS; }

Polarity polarity_from_string(std::string_view s) {
  std::string n = text::lower(s);
  if (n == "positive" || n == "pos") return Polarity::positive;
  if (n == "neutral" || n == "neu") return Polarity::neutral;
  if (n == "negative" || n == "neg") return Polarity::negative;
  throw UnknownPolarity("unknown polarity: '" + std::string(s) + "'");
}

std::string to_string(Polarity p) {
  switch (p) {
    case Polarity::positive: return "positive";
    case Polarity::neutral: return "neutral";
    case Polarity::negative: return "negative";
  }
  return "positive";
}

bool is_null_term(std::string_view term) {
  return text::lower(term) == kNullSentinel;
}

ElementOrder ElementOrder::parse(std::string_view spec) {
  ElementOrder order;
  std::string cur;
  std::stringstream ss{std::string(spec)};
  while (std::getline(ss, cur, ',')) {
    std::string f = text::normalize_ws(cur);
    if (f == "at")
      order.fields.push_back('a');
    else if (f == "ac")
      order.fields.push_back('c');
    else if (f == "sp")
      order.fields.push_back('p');
    else if (f == "ot")
      order.fields.push_back('o');
    else
      throw ConfigInvalid("unknown element in order spec: '" + f + "'");
  }
  if (order.fields.size() < 3 || order.fields.size() > 4)
    throw ConfigInvalid("element order must list 3 or 4 fields: " +
                        std::string(spec));
  return order;
}

ElementOrder ElementOrder::default_for(Task t) {
  switch (t) {
    case Task::ASQP:
    case Task::ACOS:
      return parse("at,ac,sp,ot");
    case Task::TASD:
      return parse("at,ac,sp");
    case Task::ASTE:
      return parse("at,ot,sp");
  }
  return parse("at,ac,sp,ot");
}

std::string ElementOrder::to_string() const {
  std::string out;
  for (char f : fields) {
    if (!out.empty()) out += ',';
    switch (f) {
      case 'a': out += "at"; break;
      case 'c': out += "ac"; break;
      case 'p': out += "sp"; break;
      case 'o': out += "ot"; break;
    }
  }
  return out;
}

namespace {

// Parser for the bracketed annotation: a list of element lists with single-
// or double-quoted strings, tolerant of whitespace between tokens.
class AnnotationParser {
 public:
  explicit AnnotationParser(std::string_view s) : s_(s) {}

  std::vector<std::vector<std::string>> parse() {
    skip_ws();
    expect('[');
    std::vector<std::vector<std::string>> lists;
    skip_ws();
    if (peek() == ']') {
      ++pos_;
    } else {
      while (true) {
        lists.push_back(parse_inner());
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          skip_ws();
          continue;
        }
        expect(']');
        break;
      }
    }
    skip_ws();
    if (pos_ != s_.size())
      throw MalformedLine("trailing bytes after annotation list");
    return lists;
  }

 private:
  std::vector<std::string> parse_inner() {
    expect('[');
    std::vector<std::string> items;
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return items;
    }
    while (true) {
      items.push_back(parse_string());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        continue;
      }
      expect(']');
      break;
    }
    return items;
  }

  std::string parse_string() {
    char q = peek();
    if (q != '\'' && q != '"')
      throw MalformedLine("expected quoted string in annotation");
    ++pos_;
    std::string out;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '\\' && pos_ + 1 < s_.size()) {
        out.push_back(s_[pos_ + 1]);
        pos_ += 2;
        continue;
      }
      if (c == q) {
        ++pos_;
        return out;
      }
      out.push_back(c);
      ++pos_;
    }
    throw MalformedLine("unterminated string in annotation");
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c)
      throw MalformedLine(std::string("expected '") + c + "' in annotation");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  std::string_view s_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<std::vector<std::string>> parse_annotation_lists(
    std::string_view annotation) {
  return AnnotationParser(annotation).parse();
}

namespace {

std::string quote_python_style(const std::string& s) {
  bool has_single = s.find('\'') != std::string::npos;
  bool has_double = s.find('"') != std::string::npos;
  char q = (has_single && !has_double) ? '"' : '\'';
  std::string out(1, q);
  for (char c : s) {
    if (c == q || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back(q);
  return out;
}

}  // namespace

AnnotatedExample parse_line(std::string_view line, Task task,
                            const ParseOptions& opts) {
  size_t sep = line.find(kSeparator);
  if (sep == std::string_view::npos)
    throw MalformedLine("missing '####' separator");

  AnnotatedExample ex;
  ex.task = task;
  ex.text = std::string(line.substr(0, sep));
  ex.raw_annotation = std::string(line.substr(sep + kSeparator.size()));

  auto lists = parse_annotation_lists(ex.raw_annotation);
  if (lists.empty()) throw MalformedLine("annotation carries no tuples");

  ElementOrder order =
      opts.order ? *opts.order : ElementOrder::default_for(task);
  size_t arity = is_quad_task(task) ? 4 : 3;
  if (order.fields.size() != arity)
    throw ConfigInvalid("element order arity does not match task");

  for (const auto& items : lists) {
    if (items.size() != arity) {
      std::ostringstream msg;
      msg << "expected " << arity << " elements, got " << items.size();
      throw ArityMismatch(msg.str());
    }
    Quadruplet q;
    for (size_t i = 0; i < arity; ++i) {
      switch (order.fields[i]) {
        case 'a':
          q.aspect_term = is_null_term(items[i]) ? std::string(kNullSentinel)
                                                 : items[i];
          break;
        case 'c': q.aspect_category = items[i]; break;
        case 'p': q.polarity = polarity_from_string(items[i]); break;
        case 'o':
          q.opinion_term = is_null_term(items[i]) ? std::string(kNullSentinel)
                                                  : items[i];
          break;
      }
    }
    for (const std::string* term : {&q.aspect_term, &q.opinion_term}) {
      if (term->empty() || is_null_term(*term)) continue;
      if (!text::contains_normalized(ex.text, *term))
        throw TermNotInSentence("term '" + *term + "' not found in sentence");
    }
    if (opts.category_set && !q.aspect_category.empty() &&
        !opts.category_set->count(q.aspect_category))
      throw MalformedLine("category '" + q.aspect_category +
                          "' outside declared category set");
    ex.quads.push_back(std::move(q));
  }
  return ex;
}

std::string serialize_example(const AnnotatedExample& example) {
  std::string out = example.text;
  out += kSeparator;
  if (!example.raw_annotation.empty()) {
    out += example.raw_annotation;
    return out;
  }
  ElementOrder order = ElementOrder::default_for(example.task);
  out += '[';
  for (size_t i = 0; i < example.quads.size(); ++i) {
    if (i) out += ',';
    const Quadruplet& q = example.quads[i];
    out += '[';
    for (size_t j = 0; j < order.fields.size(); ++j) {
      if (j) out += ',';
      switch (order.fields[j]) {
        case 'a': out += quote_python_style(q.aspect_term); break;
        case 'c': out += quote_python_style(q.aspect_category); break;
        case 'p': out += quote_python_style(to_string(q.polarity)); break;
        case 'o': out += quote_python_style(q.opinion_term); break;
      }
    }
    out += ']';
  }
  out += ']';
  return out;
}

int64_t DatasetStats::total_quads() const {
  int64_t total = 0;
  for (const auto& [pol, n] : quad_counts_by_polarity) total += n;
  return total;
}

DatasetStats dataset_stats(const std::vector<AnnotatedExample>& examples) {
  DatasetStats stats;
  stats.quad_counts_by_polarity[Polarity::positive] = 0;
  stats.quad_counts_by_polarity[Polarity::neutral] = 0;
  stats.quad_counts_by_polarity[Polarity::negative] = 0;
  std::set<std::string> categories;
  for (const auto& ex : examples) {
    ++stats.sentence_count;
    for (const auto& q : ex.quads) {
      ++stats.quad_counts_by_polarity[q.polarity];
      if (!q.aspect_category.empty()) categories.insert(q.aspect_category);
    }
  }
  stats.category_set_size = static_cast<int64_t>(categories.size());
  return stats;
}

std::vector<AnnotatedExample> load_dataset(const std::string& path, Task task,
                                           const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw MissingUpstream("cannot open dataset file: " + path);
  std::vector<AnnotatedExample> out;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      AnnotatedExample ex = parse_line(line, task, opts);
      ex.id = std::to_string(lineno);
      out.push_back(std::move(ex));
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << path << ":" << lineno << ": " << e.what();
      throw Error(e.kind(), msg.str());
    }
  }
  return out;
}

void save_dataset(const std::string& path,
                  const std::vector<AnnotatedExample>& examples) {
  std::ofstream out(path);
  if (!out) throw StageFailed("cannot write dataset file: " + path);
  for (const auto& ex : examples) out << serialize_example(ex) << '\n';
}

}  // namespace atoss::core
