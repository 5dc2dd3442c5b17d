#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "codescope/corpus/generator.hpp"
#include "codescope/corpus/vocab.hpp"
#include "codescope/rsa/rsa.hpp"

using namespace codescope;
using namespace codescope::rsa;

namespace {

nc::Tensor vec(std::vector<double> v) {
  std::vector<int64_t> shape{static_cast<int64_t>(v.size())};
  return nc::Tensor(shape, std::move(v));
}

model::EncoderParams tiny_model(uint64_t seed, int64_t vocab = 30) {
  model::ModelConfig c;
  c.num_layers = 2;
  c.hidden_dim = 8;
  c.ffn_dim = 16;
  c.num_heads = 2;
  c.vocab_size = vocab;
  c.max_positions = 16;
  nc::Rng rng(seed);
  return model::init_params(c, rng);
}

std::vector<std::vector<int64_t>> toy_snippets(int n, uint64_t seed,
                                               int64_t vocab = 30) {
  nc::Rng rng(seed);
  std::vector<std::vector<int64_t>> out;
  for (int i = 0; i < n; ++i) {
    std::vector<int64_t> s(6 + static_cast<size_t>(rng.uniform_int(5)));
    for (auto& t : s) t = 6 + rng.uniform_int(vocab - 6);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("similarity matrix is symmetric with unit diagonal") {
  std::vector<nc::Tensor> vs = {vec({1, 0, 0}), vec({1, 1, 0}), vec({-1, 2, 5}),
                                vec({0.3, -0.2, 0.9})};
  auto m = distance_matrix(vs);
  REQUIRE(m.rows() == 4);
  REQUIRE(m.cols() == 4);
  for (int64_t i = 0; i < 4; ++i) {
    CHECK(m.at(i, i) == doctest::Approx(1.0).epsilon(1e-12));
    for (int64_t j = 0; j < 4; ++j) {
      CHECK(m.at(i, j) == m.at(j, i));
      CHECK(m.at(i, j) <= 1.0 + 1e-9);
      CHECK(m.at(i, j) >= -1.0 - 1e-9);
    }
  }
  // hand-checked entry: cos((1,0,0),(1,1,0)) = 1/sqrt(2)
  CHECK(m.at(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("zero-norm vectors are reported by index") {
  std::vector<nc::Tensor> vs = {vec({1, 0}), vec({0, 0}), vec({0, 1})};
  try {
    distance_matrix(vs);
    FAIL("expected NumericError");
  } catch (const nc::NumericError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("pearson over upper triangles matches a hand computation") {
  // 3x3 symmetric matrices: triangles (a,b,c) and (d,e,f)
  auto mk = [](double a, double b, double c) {
    nc::Tensor t({3, 3});
    t.at(0, 0) = t.at(1, 1) = t.at(2, 2) = 1;
    t.at(0, 1) = t.at(1, 0) = a;
    t.at(0, 2) = t.at(2, 0) = b;
    t.at(1, 2) = t.at(2, 1) = c;
    return t;
  };
  auto x = mk(0.1, 0.5, 0.9);
  auto y = mk(0.2, 0.4, 0.6);
  // r = cov/(sx*sy) over pairs {(0.1,0.2),(0.5,0.4),(0.9,0.6)}
  double mx = 0.5, my = 0.4;
  double num = (0.1 - mx) * (0.2 - my) + (0.5 - mx) * (0.4 - my) +
               (0.9 - mx) * (0.6 - my);
  double den = std::sqrt(((0.1 - mx) * (0.1 - mx) + 0 + (0.9 - mx) * (0.9 - mx)) *
                         ((0.2 - my) * (0.2 - my) + 0 + (0.6 - my) * (0.6 - my)));
  CHECK(pearson(x, y) == doctest::Approx(num / den).epsilon(1e-12));
  CHECK(pearson(x, x) == 1.0);  // bitwise-equal short-circuit
  CHECK(pearson(x, mk(-0.1, -0.5, -0.9)) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pearson input validation") {
  nc::Tensor small({2, 2});
  CHECK_THROWS(pearson(small, small));  // N >= 3 required
  auto flat = nc::Tensor::full({3, 3}, 0.5);
  nc::Tensor other({3, 3});
  other.at(0, 1) = 0.1;
  other.at(0, 2) = 0.5;
  other.at(1, 2) = 0.9;
  CHECK_THROWS_AS(pearson(flat, other), nc::NumericError);  // zero variance
  nc::Tensor rect({3, 4});
  CHECK_THROWS(pearson(rect, rect));
}

TEST_CASE("interpretation bands follow the 0.8 / 0.5 thresholds") {
  CHECK(band(1.0) == "fairly similar");
  CHECK(band(0.8) == "fairly similar");
  CHECK(band(0.79) == "intermediate");
  CHECK(band(0.5) == "intermediate");
  CHECK(band(0.49) == "dissimilar");
  CHECK(band(-0.3) == "dissimilar");
}

TEST_CASE("a model compared with itself scores 1 at every layer") {
  auto m = tiny_model(3);
  auto snippets = toy_snippets(12, 4);
  auto rep = rsa_compare(m, m, snippets);
  REQUIRE(rep.rho.size() == 3);  // L+1 layers
  for (size_t l = 0; l < rep.rho.size(); ++l) {
    CHECK(rep.rho[l] == 1.0);
    CHECK(rep.bands[l] == "fairly similar");
  }
  CHECK(rep.n == 12);
  CHECK(!rep.snippet_hash.empty());
}

TEST_CASE("independently initialized models are not identical") {
  auto a = tiny_model(3);
  auto b = tiny_model(4);
  auto snippets = toy_snippets(12, 4);
  auto rep = rsa_compare(a, b, snippets);
  bool below_one = false;
  for (double r : rep.rho) {
    CHECK(std::isfinite(r));
    CHECK(r <= 1.0);
    below_one = below_one || r < 0.999999;
  }
  CHECK(below_one);
}

TEST_CASE("layer vectors pool over positions") {
  auto m = tiny_model(5);
  auto snippets = toy_snippets(4, 6);
  for (int layer = 0; layer <= 2; ++layer) {
    auto vs = repr_vectors(m, snippets, layer);
    REQUIRE(vs.size() == snippets.size());
    for (const auto& v : vs) {
      CHECK(v.numel() == m.config.hidden_dim);
      CHECK(v.all_finite());
    }
  }
  CHECK_THROWS(repr_vectors(m, snippets, 3));
  CHECK_THROWS(repr_vectors(m, snippets, -1));
}

TEST_CASE("comparison requires identically shaped models and enough snippets") {
  auto a = tiny_model(3);
  auto snippets = toy_snippets(2, 4);
  CHECK_THROWS(rsa_compare(a, a, snippets));  // N < 3
  auto c = tiny_model(3, 31);                 // different vocab
  CHECK_THROWS(rsa_compare(a, c, toy_snippets(8, 4)));
}

TEST_CASE("snippet sampling is deterministic, unique, and seed-dependent") {
  auto recs = corpus::generate_toy_corpus(1, 50);
  auto s1 = sample_snippets(recs, 10, 7);
  auto s2 = sample_snippets(recs, 10, 7);
  auto s3 = sample_snippets(recs, 10, 8);
  REQUIRE(s1.size() == 10);
  std::set<std::string> ids;
  for (const auto& r : s1) ids.insert(r.id);
  CHECK(ids.size() == 10);
  for (size_t i = 0; i < 10; ++i) CHECK(s1[i].id == s2[i].id);
  bool differ = false;
  for (size_t i = 0; i < 10; ++i) differ = differ || s1[i].id != s3[i].id;
  CHECK(differ);
  CHECK(sample_snippets(recs, 100, 7).size() == recs.size());  // capped
}

TEST_CASE("snippet set hash tracks content") {
  auto a = toy_snippets(6, 1);
  auto b = toy_snippets(6, 1);
  auto c = toy_snippets(6, 2);
  CHECK(snippet_set_hash(a) == snippet_set_hash(b));
  CHECK(snippet_set_hash(a) != snippet_set_hash(c));
}

TEST_CASE("reports serialize with per-layer values") {
  auto m = tiny_model(9);
  auto rep = rsa_compare(m, m, toy_snippets(8, 2));
  rep.model_a = "a.ckpt";
  rep.model_b = "b.ckpt";
  auto js = report_json(rep, 0, "cafef00d");
  CHECK(js.find("\"rho\"") != std::string::npos);
  CHECK(js.find("cafef00d") != std::string::npos);
  CHECK(js.find("a.ckpt") != std::string::npos);
  auto csv = report_csv(rep);
  CHECK(csv.find("layer") != std::string::npos);
  // header + one row per layer
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(rep.rho.size()) + 1);
}
