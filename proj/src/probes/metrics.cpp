#include "codescope/probes/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "codescope/numcore/ops.hpp"

namespace codescope::probes {

double eval_accuracy(const std::vector<int>& predictions,
                     const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw nc::DimensionError("eval_accuracy: length mismatch");
  if (predictions.empty()) return 0.0;
  size_t correct = 0;
  for (size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

MapResult eval_map(const std::vector<nc::Tensor>& embeddings,
                   const std::vector<int>& labels) {
  if (embeddings.size() != labels.size())
    throw nc::DimensionError("eval_map: length mismatch");
  const size_t n = embeddings.size();
  MapResult res;
  double ap_sum = 0.0;
  for (size_t q = 0; q < n; ++q) {
    size_t relevant = 0;
    for (size_t j = 0; j < n; ++j)
      if (j != q && labels[j] == labels[q]) ++relevant;
    if (relevant == 0) {
      ++res.skipped;
      continue;
    }
    std::vector<std::pair<double, size_t>> scored;
    scored.reserve(n - 1);
    for (size_t j = 0; j < n; ++j) {
      if (j == q) continue;
      scored.emplace_back(nc::cosine_similarity(embeddings[q], embeddings[j]), j);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first > b.first;
    });
    double ap = 0.0;
    size_t hit = 0;
    for (size_t rank = 0; rank < scored.size(); ++rank) {
      if (labels[scored[rank].second] == labels[q]) {
        ++hit;
        ap += static_cast<double>(hit) / static_cast<double>(rank + 1);
      }
    }
    ap_sum += ap / static_cast<double>(relevant);
    ++res.queries;
  }
  res.map = res.queries > 0 ? ap_sum / res.queries : 0.0;
  return res;
}

}  // namespace codescope::probes
