#include "codescope/telly/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace codescope::telly {

double metric_mrr(const std::vector<int>& ranks) {
  if (ranks.empty()) throw std::invalid_argument("metric_mrr: empty ranks");
  double s = 0.0;
  for (int r : ranks) {
    if (r < 1) throw std::invalid_argument("metric_mrr: rank < 1");
    s += 1.0 / r;
  }
  return s / static_cast<double>(ranks.size());
}

double metric_recall_at_k(const std::vector<int>& ranks, int k) {
  if (ranks.empty()) throw std::invalid_argument("metric_recall_at_k: empty ranks");
  size_t hit = 0;
  for (int r : ranks) {
    if (r < 1) throw std::invalid_argument("metric_recall_at_k: rank < 1");
    if (r <= k) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(ranks.size());
}

Prf metric_prf(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("metric_prf: length mismatch");
  int64_t tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == 1 && labels[i] == 1) ++tp;
    else if (predictions[i] == 1 && labels[i] == 0) ++fp;
    else if (predictions[i] == 0 && labels[i] == 1) ++fn;
  }
  Prf out;
  if (tp + fp > 0) out.precision = static_cast<double>(tp) / (tp + fp);
  if (tp + fn > 0) out.recall = static_cast<double>(tp) / (tp + fn);
  if (out.precision + out.recall > 0.0)
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

int levenshtein(const std::string& a, const std::string& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double metric_edit_sim(const std::string& a, const std::string& b) {
  size_t mx = std::max(a.size(), b.size());
  if (mx == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(mx);
}

namespace {
std::string normalize_ws(const std::string& s) {
  std::string out;
  bool in_ws = true;  // trims leading whitespace
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!in_ws) out += ' ';
      in_ws = true;
    } else {
      out += c;
      in_ws = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}
}  // namespace

int metric_em(const std::string& a, const std::string& b) {
  return normalize_ws(a) == normalize_ws(b) ? 1 : 0;
}

}  // namespace codescope::telly
