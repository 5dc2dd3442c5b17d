#pragma once

#include <vector>

#include "codescope/corpus/generator.hpp"

namespace codescope::corpus {

struct SplitSpec {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

struct Splits {
  std::vector<CorpusRecord> train;
  std::vector<CorpusRecord> valid;
  std::vector<CorpusRecord> test;
  bool degenerate = false;  // some split came out empty
};

/// Deterministic hash-of-id bucketing; disjoint and exhaustive partition,
/// stable across runs and record order (assignment depends only on the id).
/// Ratios must sum to 1 (within 1e-9).
Splits make_splits(const std::vector<CorpusRecord>& corpus, const SplitSpec& spec);

}  // namespace codescope::corpus
