#pragma once

#include <string>
#include <vector>

namespace codescope::telly {

/// MRR = mean(1/rank); ranks are 1-based. Throws on empty input or rank < 1.
double metric_mrr(const std::vector<int>& ranks);

/// Fraction of ranks <= k.
double metric_recall_at_k(const std::vector<int>& ranks, int k);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Binary precision/recall/F1; each component 0 when its denominator is 0.
Prf metric_prf(const std::vector<int>& predictions, const std::vector<int>& labels);

int levenshtein(const std::string& a, const std::string& b);

/// 1 - lev(a,b)/max(|a|,|b|); 1.0 when both empty.
double metric_edit_sim(const std::string& a, const std::string& b);

/// Exact match after whitespace normalization (runs collapsed, ends trimmed).
int metric_em(const std::string& a, const std::string& b);

}  // namespace codescope::telly
