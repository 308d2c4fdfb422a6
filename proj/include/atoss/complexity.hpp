// Simple/compound sentence categorization and per-dataset ratio reporting.
#pragma once

#include <utility>
#include <vector>

#include "atoss/core.hpp"

namespace atoss::complexity {

enum class ComplexityLabel { Simple, Compound };

std::string to_string(ComplexityLabel label);

// Simple iff the example carries a single quad and its text contains neither
// a comma nor a clause-joining conjunction token (and/or/but, matched on
// whole lowercase tokens). Everything else is Compound.
ComplexityLabel classify(const core::AnnotatedExample& example);

struct RatioReport {
  double simple_pct = 0.0;
  double compound_pct = 0.0;
  int64_t simple_count = 0;
  int64_t compound_count = 0;
};

// Throws EmptyDataset on an empty list. Percentages sum to 100.
RatioReport ratio_report(const std::vector<core::AnnotatedExample>& examples);

}  // namespace atoss::complexity
