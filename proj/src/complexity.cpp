#include "atoss/complexity.hpp"

#include "atoss/text.hpp"

namespace atoss::complexity {

std::string to_string(ComplexityLabel label) {
  return label == ComplexityLabel::Simple ? "simple" : "compound";
}

ComplexityLabel classify(const core::AnnotatedExample& example) {
  if (example.quads.size() != 1) return ComplexityLabel::Compound;
  if (example.text.find(',') != std::string::npos)
    return ComplexityLabel::Compound;
  for (const auto& tok : text::tokens(text::lower(example.text))) {
    if (tok == "and" || tok == "or" || tok == "but")
      return ComplexityLabel::Compound;
  }
  return ComplexityLabel::Simple;
}

RatioReport ratio_report(const std::vector<core::AnnotatedExample>& examples) {
  if (examples.empty()) throw EmptyDataset("ratio_report on empty dataset");
  RatioReport report;
  for (const auto& ex : examples) {
    if (classify(ex) == ComplexityLabel::Simple)
      ++report.simple_count;
    else
      ++report.compound_count;
  }
  double total = static_cast<double>(examples.size());
  report.simple_pct = 100.0 * static_cast<double>(report.simple_count) / total;
  report.compound_pct = 100.0 - report.simple_pct;
  return report;
}

}  // namespace atoss::complexity
