#pragma once

#include <string>
#include <vector>

#include "codescope/corpus/generator.hpp"
#include "codescope/model/encoder.hpp"

namespace codescope::rsa {

/// Mean-pooled layer-l vector per snippet (one forward pass per snippet).
std::vector<nc::Tensor> repr_vectors(const model::EncoderParams& m,
                                     const std::vector<std::vector<int64_t>>& snippets,
                                     int layer);

/// Pairwise cosine similarity matrix: symmetric, unit diagonal. Throws
/// NumericError naming the snippet index for a zero-norm vector.
nc::Tensor distance_matrix(const std::vector<nc::Tensor>& vectors);

/// Pearson correlation over the strict upper triangles of two equal-size
/// square matrices (N >= 3). Bitwise-equal triangles short-circuit to
/// exactly 1.0; zero variance otherwise raises NumericError.
double pearson(const nc::Tensor& m1, const nc::Tensor& m2);

/// Interpretation bands: >= 0.8 "fairly similar", < 0.5 "dissimilar",
/// otherwise "intermediate".
std::string band(double rho);

struct RsaReport {
  std::vector<double> rho;        // per layer 0..L
  std::vector<std::string> bands;
  int n = 0;
  std::string snippet_hash;
  std::string model_a, model_b;
};

/// Per-layer rho between two models of identical shape over a common
/// snippet set.
RsaReport rsa_compare(const model::EncoderParams& a, const model::EncoderParams& b,
                      const std::vector<std::vector<int64_t>>& snippets);

/// Deterministic uniform sample without replacement.
std::vector<corpus::CorpusRecord> sample_snippets(
    const std::vector<corpus::CorpusRecord>& corpus, int n, uint64_t seed);

std::string snippet_set_hash(const std::vector<std::vector<int64_t>>& snippets);

std::string report_json(const RsaReport& r, uint64_t seed,
                        const std::string& config_hash);
std::string report_csv(const RsaReport& r);

}  // namespace codescope::rsa
