#pragma once

#include <vector>

#include "codescope/numcore/tensor.hpp"

namespace codescope::probes {

/// Exact-match fraction; throws DimensionError on length mismatch.
double eval_accuracy(const std::vector<int>& predictions,
                     const std::vector<int>& labels);

struct MapResult {
  double map = 0.0;
  int queries = 0;
  int skipped = 0;  // singleton-cluster queries
};

/// Mean average precision: each item queries all others ranked by cosine
/// similarity; AP averages precision at each relevant rank. Singleton
/// clusters are skipped (counted).
MapResult eval_map(const std::vector<nc::Tensor>& embeddings,
                   const std::vector<int>& labels);

}  // namespace codescope::probes
