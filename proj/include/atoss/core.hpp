// Annotation data model for quad (ASQP/ACOS) and triplet (TASD/ASTE) tasks:
// parsing of "<sentence>####<bracketed annotation>" lines, validation,
// serialization and dataset statistics.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "atoss/error.hpp"

namespace atoss::core {

enum class Task { ASQP, ACOS, TASD, ASTE };

Task task_from_string(std::string_view name);
std::string to_string(Task t);

// True for tasks whose annotations carry four elements.
bool is_quad_task(Task t);

enum class Polarity { positive, neutral, negative };

// Case-insensitive; accepts the pos/neu/neg short forms seen in triplet
// releases. Throws UnknownPolarity otherwise.
Polarity polarity_from_string(std::string_view s);
std::string to_string(Polarity p);

inline constexpr std::string_view kNullSentinel = "null";

// True when the term is the NULL sentinel (case-insensitive).
bool is_null_term(std::string_view term);

// One sentiment annotation. For TASD the opinion term is absent, for ASTE the
// aspect category is absent; absent fields hold an empty string. NULL terms
// hold the canonical lowercase sentinel "null".
struct Quadruplet {
  std::string aspect_term;
  std::string aspect_category;
  Polarity polarity = Polarity::positive;
  std::string opinion_term;

  auto operator<=>(const Quadruplet&) const = default;
};

struct AnnotatedExample {
  std::string id;
  std::string text;  // dataset tokenization preserved verbatim
  std::vector<Quadruplet> quads;
  Task task = Task::ASQP;
  // Raw bytes after the #### separator, kept so accepted lines re-serialize
  // byte-identically across variant release formats. Empty for examples
  // built programmatically.
  std::string raw_annotation;

  bool operator==(const AnnotatedExample& o) const {
    return text == o.text && quads == o.quads && task == o.task;
  }
};

// Which annotation field each bracketed element position holds. Public ABSA
// releases vary, so the order can be overridden per file.
struct ElementOrder {
  std::vector<char> fields;  // 'a' = aspect, 'c' = category, 'p' = polarity, 'o' = opinion

  static ElementOrder parse(std::string_view spec);  // e.g. "at,ac,sp,ot"
  static ElementOrder default_for(Task t);
  std::string to_string() const;
};

struct ParseOptions {
  std::optional<ElementOrder> order;          // defaults to task order
  std::optional<std::set<std::string>> category_set;  // validated when present
};

// Parses a bracketed list-of-element-lists ("[['a','b'],...]"), tolerant of
// whitespace and of single or double quotes. Throws MalformedLine.
std::vector<std::vector<std::string>> parse_annotation_lists(
    std::string_view annotation);

AnnotatedExample parse_line(std::string_view line, Task task,
                            const ParseOptions& opts = {});

// Inverse of parse_line: emits the preserved raw annotation when present,
// canonical "[['at','ac','sp','ot'],...]" form otherwise.
std::string serialize_example(const AnnotatedExample& example);

struct DatasetStats {
  int64_t sentence_count = 0;
  std::map<Polarity, int64_t> quad_counts_by_polarity;
  int64_t category_set_size = 0;

  int64_t total_quads() const;
};

DatasetStats dataset_stats(const std::vector<AnnotatedExample>& examples);

// Reads one example per line; ids are 1-based line numbers as strings.
// Blank lines are skipped. Parse errors are rethrown with the line number
// prepended.
std::vector<AnnotatedExample> load_dataset(const std::string& path, Task task,
                                           const ParseOptions& opts = {});

void save_dataset(const std::string& path,
                  const std::vector<AnnotatedExample>& examples);

}  // namespace atoss::core
