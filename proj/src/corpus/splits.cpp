#include "codescope/corpus/splits.hpp"

#include <cmath>
#include <stdexcept>

namespace codescope::corpus {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

Splits make_splits(const std::vector<CorpusRecord>& corpus, const SplitSpec& spec) {
  if (std::abs(spec.train + spec.valid + spec.test - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios must sum to 1");
  constexpr uint64_t kBuckets = 10000;
  const uint64_t train_hi = static_cast<uint64_t>(spec.train * kBuckets);
  const uint64_t valid_hi = train_hi + static_cast<uint64_t>(spec.valid * kBuckets);
  Splits out;
  for (const auto& r : corpus) {
    // salt distinguishes the split hash from other uses of the id hash
    uint64_t b = fnv1a("split:" + r.id) % kBuckets;
    if (b < train_hi) out.train.push_back(r);
    else if (b < valid_hi) out.valid.push_back(r);
    else out.test.push_back(r);
  }
  out.degenerate = !corpus.empty() &&
                   (out.train.empty() || out.valid.empty() || out.test.empty());
  return out;
}

}  // namespace codescope::corpus
