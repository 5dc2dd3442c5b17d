#include "codescope/rsa/rsa.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace codescope::rsa {

using nc::Tensor;

std::vector<Tensor> repr_vectors(const model::EncoderParams& m,
                                 const std::vector<std::vector<int64_t>>& snippets,
                                 int layer) {
  if (layer < 0 || layer > m.config.num_layers)
    throw std::invalid_argument("layer out of range");
  std::vector<Tensor> out;
  out.reserve(snippets.size());
  for (const auto& s : snippets) {
    if (s.empty()) throw std::invalid_argument("empty snippet");
    auto tr = model::forward(s, m, model::AttentionMode::Bidirectional,
                             m.config.num_layers);
    const Tensor& h = tr.h[static_cast<size_t>(layer)].value();
    Tensor v({h.cols()});
    for (int64_t r = 0; r < h.rows(); ++r)
      for (int64_t c = 0; c < h.cols(); ++c) v[c] += h.at(r, c);
    for (int64_t c = 0; c < h.cols(); ++c) v[c] /= static_cast<double>(h.rows());
    out.push_back(std::move(v));
  }
  return out;
}

Tensor distance_matrix(const std::vector<Tensor>& vectors) {
  const int64_t n = static_cast<int64_t>(vectors.size());
  std::vector<double> norms(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double x : vectors[static_cast<size_t>(i)].vec()) s += x * x;
    norms[static_cast<size_t>(i)] = std::sqrt(s);
    if (norms[static_cast<size_t>(i)] == 0.0)
      throw nc::NumericError("zero-norm representation for snippet " +
                             std::to_string(i));
  }
  Tensor m({n, n});
  for (int64_t i = 0; i < n; ++i) {
    m.at(i, i) = 1.0;
    for (int64_t j = i + 1; j < n; ++j) {
      const auto& u = vectors[static_cast<size_t>(i)].vec();
      const auto& v = vectors[static_cast<size_t>(j)].vec();
      double d = 0.0;
      for (size_t k = 0; k < u.size(); ++k) d += u[k] * v[k];
      double c = d / (norms[static_cast<size_t>(i)] * norms[static_cast<size_t>(j)]);
      m.at(i, j) = c;
      m.at(j, i) = c;
    }
  }
  return m;
}

double pearson(const Tensor& m1, const Tensor& m2) {
  if (m1.rank() != 2 || m2.rank() != 2 || m1.rows() != m1.cols() ||
      !m1.same_shape(m2))
    throw nc::DimensionError("pearson: need equal square matrices");
  const int64_t n = m1.rows();
  if (n < 3) throw std::invalid_argument("pearson: need N >= 3");
  std::vector<double> x, y;
  x.reserve(static_cast<size_t>(n * (n - 1) / 2));
  y.reserve(x.capacity());
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = i + 1; j < n; ++j) {
      x.push_back(m1.at(i, j));
      y.push_back(m2.at(i, j));
    }
  // Bit-identical triangles correlate at exactly 1 by definition; the
  // arithmetic path would round. Decide before touching floating point.
  if (x == y) return 1.0;
  double mx = 0.0, my = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    double dx = x[k] - mx, dy = y[k] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw nc::NumericError("pearson: zero variance in upper triangle");
  return sxy / std::sqrt(sxx * syy);
}

std::string band(double rho) {
  if (rho >= 0.8) return "fairly similar";
  if (rho < 0.5) return "dissimilar";
  return "intermediate";
}

RsaReport rsa_compare(const model::EncoderParams& a, const model::EncoderParams& b,
                      const std::vector<std::vector<int64_t>>& snippets) {
  if (!(a.config == b.config))
    throw std::invalid_argument("rsa_compare: model configs differ");
  RsaReport rep;
  rep.n = static_cast<int>(snippets.size());
  rep.snippet_hash = snippet_set_hash(snippets);
  for (int l = 0; l <= a.config.num_layers; ++l) {
    Tensor ma = distance_matrix(repr_vectors(a, snippets, l));
    Tensor mb = distance_matrix(repr_vectors(b, snippets, l));
    double r = pearson(ma, mb);
    rep.rho.push_back(r);
    rep.bands.push_back(band(r));
  }
  return rep;
}

std::vector<corpus::CorpusRecord> sample_snippets(
    const std::vector<corpus::CorpusRecord>& corpus, int n, uint64_t seed) {
  if (n < 0) throw std::invalid_argument("negative sample size");
  // a request larger than the corpus degrades to the whole corpus
  n = std::min(n, static_cast<int>(corpus.size()));
  nc::Rng rng(seed);
  auto idx = rng.sample_without_replacement(static_cast<int64_t>(corpus.size()),
                                            static_cast<int64_t>(n));
  std::vector<corpus::CorpusRecord> out;
  out.reserve(static_cast<size_t>(n));
  for (int64_t i : idx) out.push_back(corpus[static_cast<size_t>(i)]);
  return out;
}

std::string snippet_set_hash(const std::vector<std::vector<int64_t>>& snippets) {
  uint64_t h = 14695981039346656037ull;
  auto mix = [&h](uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (const auto& s : snippets) {
    mix(s.size());
    for (int64_t t : s) mix(static_cast<uint64_t>(t));
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::string report_json(const RsaReport& r, uint64_t seed,
                        const std::string& config_hash) {
  nlohmann::json layers = nlohmann::json::array();
  for (size_t l = 0; l < r.rho.size(); ++l)
    layers.push_back({{"l", l}, {"rho", r.rho[l]}, {"band", r.bands[l]}});
  nlohmann::json j{{"layers", layers},          {"N", r.n},
                   {"seed", seed},              {"snippet_hash", r.snippet_hash},
                   {"modelA", r.model_a},       {"modelB", r.model_b},
                   {"config_hash", config_hash}};
  return j.dump(2);
}

std::string report_csv(const RsaReport& r) {
  std::ostringstream os;
  os << "layer,rho,band\n";
  for (size_t l = 0; l < r.rho.size(); ++l)
    os << l << "," << r.rho[l] << "," << r.bands[l] << "\n";
  return os.str();
}

}  // namespace codescope::rsa
