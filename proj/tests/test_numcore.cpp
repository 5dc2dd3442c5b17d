#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "codescope/numcore/gradcheck.hpp"
#include "codescope/numcore/ops.hpp"
#include "codescope/numcore/optim.hpp"
#include "codescope/numcore/rng.hpp"

using namespace codescope::nc;

namespace {

Tensor randn(Rng& rng, std::vector<int64_t> shape, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (auto& x : t.vec()) x = rng.normal() * scale;
  return t;
}

// Max relative reverse-mode vs finite-difference error for a scalar loss
// built from leaf parameters.
double check(const std::function<Var(std::vector<Var>&)>& build,
             std::vector<Tensor> values) {
  set_precision(Precision::f64);
  ParamSet ps;
  std::vector<Var> leaves;
  for (size_t i = 0; i < values.size(); ++i)
    leaves.push_back(ps.add("p" + std::to_string(i), values[i]));
  return grad_check([&] { return build(leaves); }, ps);
}

constexpr double kTol = 1e-4;

}  // namespace

TEST_CASE("tensor basics and errors") {
  Tensor t({2, 3});
  CHECK(t.numel() == 6);
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  t.at(1, 2) = 5.0;
  CHECK(t.vec()[5] == 5.0);
  Tensor v({4});
  CHECK_THROWS_AS((void)v.rows(), DimensionError);
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0}), DimensionError);
  CHECK(Tensor::scalar(3.5).numel() == 1);
  CHECK(Tensor::full({2}, 2.0).vec() == std::vector<double>{2.0, 2.0});
}

TEST_CASE("f32 precision quantization rounds every op result") {
  set_precision(Precision::f32);
  Var a = Var::leaf(Tensor::scalar(0.1));
  Var b = Var::leaf(Tensor::scalar(0.2));
  Var c = add(a, b);
  CHECK(c.value()[0] == doctest::Approx(static_cast<float>(0.1f + 0.2f)));
  CHECK(static_cast<double>(static_cast<float>(c.value()[0])) == c.value()[0]);
  set_precision(Precision::f64);
  Var d = add(a, b);
  CHECK(d.value()[0] == 0.1 + 0.2);
}

TEST_CASE("non-finite op results are rejected") {
  set_precision(Precision::f64);
  Var a = Var::leaf(Tensor::scalar(-1.0));
  CHECK_THROWS_AS(log(a), NumericError);
  Var z = Var::leaf(Tensor::scalar(1e308));
  CHECK_THROWS_AS(mul(z, z), NumericError);
}

TEST_CASE("rng determinism and cross-instance reproducibility") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  Rng c(42), d(43);
  bool differ = false;
  for (int i = 0; i < 10; ++i) differ = differ || c.next_u64() != d.next_u64();
  CHECK(differ);
}

TEST_CASE("rng uniform moments and range") {
  Rng r(7);
  double sum = 0, mn = 1, mx = 0;
  const int N = 100000;
  for (int i = 0; i < N; ++i) {
    double x = r.uniform();
    sum += x;
    mn = std::min(mn, x);
    mx = std::max(mx, x);
  }
  CHECK(sum / N == doctest::Approx(0.5).epsilon(0.01));
  CHECK(mn >= 0.0);
  CHECK(mx < 1.0);
}

TEST_CASE("rng normal moments") {
  Rng r(9);
  double sum = 0, sq = 0;
  const int N = 100000;
  for (int i = 0; i < N; ++i) {
    double x = r.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(sum / N == doctest::Approx(0.0).epsilon(0.02));
  CHECK(sq / N == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("truncated normal stays within two standard deviations") {
  Rng r(11);
  for (int i = 0; i < 10000; ++i) {
    double x = r.truncated_normal(0.02);
    CHECK(std::abs(x) <= 0.04);
  }
}

TEST_CASE("uniform_int is unbiased across residue classes") {
  Rng r(13);
  std::vector<int> counts(7, 0);
  const int N = 70000;
  for (int i = 0; i < N; ++i) counts[static_cast<size_t>(r.uniform_int(7))]++;
  for (int c : counts) CHECK(std::abs(c - N / 7) < N / 7 * 0.05);
}

TEST_CASE("shuffle is a permutation; sampling is distinct and sorted") {
  Rng r(17);
  std::vector<int64_t> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  r.shuffle(w);
  auto ws = w;
  std::sort(ws.begin(), ws.end());
  CHECK(ws == v);
  auto s = r.sample_without_replacement(100, 20);
  CHECK(s.size() == 20);
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
}

TEST_CASE("gradcheck: elementwise ops") {
  Rng rng(1);
  auto v = randn(rng, {3, 4}, 0.5);
  auto w = randn(rng, {3, 4}, 0.5);
  CHECK(check([](auto& p) { return sum(add(p[0], p[1])); }, {v, w}) < kTol);
  CHECK(check([](auto& p) { return sum(sub(p[0], p[1])); }, {v, w}) < kTol);
  CHECK(check([](auto& p) { return sum(mul(p[0], p[1])); }, {v, w}) < kTol);
  CHECK(check([](auto& p) { return sum(scale(p[0], -1.7)); }, {v}) < kTol);
  CHECK(check([](auto& p) { return sum(sigmoid(p[0])); }, {v}) < kTol);
  CHECK(check([](auto& p) { return sum(gelu(p[0])); }, {v}) < kTol);
  CHECK(check([](auto& p) { return sum(square(p[0])); }, {v}) < kTol);
  CHECK(check([](auto& p) { return sum(exp(p[0])); }, {v}) < kTol);
  // abs is non-differentiable at 0; inputs here are bounded away from it
  Tensor a({4}, {0.5, -0.25, 1.5, -2.0});
  CHECK(check([](auto& p) { return sum(abs(p[0])); }, {a}) < kTol);
  Tensor pos({3}, {0.5, 1.5, 3.0});
  CHECK(check([](auto& p) { return sum(log(p[0])); }, {pos}) < kTol);
}

TEST_CASE("gradcheck: matrix and reduction ops") {
  Rng rng(2);
  auto A = randn(rng, {3, 4}, 0.7);
  auto B = randn(rng, {4, 5}, 0.7);
  auto b = randn(rng, {4}, 0.7);
  CHECK(check([](auto& p) { return sum(matmul(p[0], p[1])); }, {A, B}) < kTol);
  CHECK(check([](auto& p) { return sum(square(matmul(p[0], p[1]))); }, {A, B}) < kTol);
  CHECK(check([](auto& p) { return sum(transpose(p[0])); }, {A}) < kTol);
  CHECK(check([](auto& p) { return sum(add_rowvec(p[0], p[1])); }, {A, b}) < kTol);
  CHECK(check([](auto& p) { return sum(mean_rows(p[0])); }, {A}) < kTol);
  CHECK(check([](auto& p) { return sum(row(p[0], 1)); }, {A}) < kTol);
  CHECK(check([](auto& p) { return sum(slice_cols(p[0], 1, 3)); }, {A}) < kTol);
  auto u = randn(rng, {6}, 0.7);
  auto w = randn(rng, {6}, 0.7);
  CHECK(check([](auto& p) { return dot(p[0], p[1]); }, {u, w}) < kTol);
  CHECK(check([](auto& p) { return cosine_similarity(p[0], p[1]); }, {u, w}) < kTol);
  CHECK(check([](auto& p) { return sum(mul_scalar(dot(p[0], p[1]), p[0])); },
              {u, w}) < kTol);
}

TEST_CASE("gradcheck: structural ops") {
  Rng rng(3);
  auto u = randn(rng, {5}, 0.6);
  auto w = randn(rng, {5}, 0.6);
  auto A = randn(rng, {2, 3}, 0.6);
  auto B = randn(rng, {2, 4}, 0.6);
  CHECK(check([](auto& p) { return sum(square(stack_rows({p[0], p[1]}))); },
              {u, w}) < kTol);
  CHECK(check([](auto& p) { return sum(square(concat({p[0], p[1]}))); }, {u, w}) <
        kTol);
  CHECK(check([](auto& p) { return sum(square(concat_cols({p[0], p[1]}))); },
              {A, B}) < kTol);
  CHECK(check([](auto& p) { return sum(add_many({p[0], p[1], p[0]})); }, {u, w}) <
        kTol);
}

TEST_CASE("gradcheck: softmax, layer_norm, cross_entropy, embedding") {
  Rng rng(4);
  auto X = randn(rng, {3, 5}, 0.8);
  auto g = randn(rng, {5}, 0.2);
  auto b = randn(rng, {5}, 0.2);
  CHECK(check([](auto& p) { return sum(square(softmax(p[0]))); }, {X}) < kTol);
  CHECK(check([](auto& p) { return sum(square(layer_norm(p[0], p[1], p[2]))); },
              {X, g, b}) < kTol);
  std::vector<int64_t> targets = {1, 4, 0};
  CHECK(check([&](auto& p) { return cross_entropy(p[0], targets); }, {X}) < kTol);
  auto table = randn(rng, {7, 4}, 0.5);
  std::vector<int64_t> ids = {0, 3, 3, 6};
  CHECK(check(
            [&](auto& p) { return sum(square(embedding_rows(p[0], ids))); },
            {table}) < kTol);
}

TEST_CASE("softmax rows sum to one and match a log-sum-exp oracle") {
  set_precision(Precision::f64);
  Rng rng(5);
  auto X = randn(rng, {4, 6}, 3.0);
  Var s = softmax(Var::constant(X));
  for (int64_t i = 0; i < 4; ++i) {
    double lse = 0, mx = -1e300;
    for (int64_t j = 0; j < 6; ++j) mx = std::max(mx, X.at(i, j));
    for (int64_t j = 0; j < 6; ++j) lse += std::exp(X.at(i, j) - mx);
    lse = mx + std::log(lse);
    double rowsum = 0;
    for (int64_t j = 0; j < 6; ++j) {
      CHECK(s.value().at(i, j) ==
            doctest::Approx(std::exp(X.at(i, j) - lse)).epsilon(1e-12));
      rowsum += s.value().at(i, j);
    }
    CHECK(rowsum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("softmax is invariant to large row shifts (stability)") {
  set_precision(Precision::f64);
  Tensor X({1, 3}, {1000.0, 1001.0, 1002.0});
  Var s = softmax(Var::constant(X));
  double e = std::exp(1.0);
  double z = 1 + e + e * e;
  CHECK(s.value().at(0, 2) == doctest::Approx(e * e / z).epsilon(1e-12));
}

TEST_CASE("cross entropy equals manual negative log likelihood") {
  set_precision(Precision::f64);
  Tensor X({2, 3}, {0.2, 1.1, -0.4, 2.0, -1.0, 0.5});
  std::vector<int64_t> t = {1, 0};
  Var ce = cross_entropy(Var::constant(X), t);
  double expected = 0;
  for (int64_t i = 0; i < 2; ++i) {
    double z = 0;
    for (int64_t j = 0; j < 3; ++j) z += std::exp(X.at(i, j));
    expected += -(X.at(i, t[static_cast<size_t>(i)]) - std::log(z));
  }
  expected /= 2;
  CHECK(ce.value()[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("backward accumulates through shared subexpressions") {
  set_precision(Precision::f64);
  ParamSet ps;
  Var x = ps.add("x", Tensor::scalar(3.0));
  Var y = add(mul(x, x), x);  // x^2 + x, dy/dx = 2x + 1 = 7
  backward(y);
  CHECK(x.grad()[0] == doctest::Approx(7.0));
}

TEST_CASE("detach blocks gradient flow") {
  set_precision(Precision::f64);
  ParamSet ps;
  Var x = ps.add("x", Tensor::scalar(2.0));
  Var y = mul(x.detach(), x);  // treated as c*x with c=2
  backward(y);
  CHECK(x.grad()[0] == doctest::Approx(2.0));
}

TEST_CASE("adam matches a hand-computed first step and skips frozen params") {
  set_precision(Precision::f64);
  ParamSet ps;
  Var w = ps.add("w", Tensor::scalar(1.0));
  Var f = ps.add("frozen", Tensor::scalar(5.0), /*trainable=*/false);
  Var loss = add(mul(w, w), mul(f, f));
  ps.zero_grads();
  backward(loss);
  AdamConfig cfg;
  cfg.lr = 0.1;
  Adam opt(cfg);
  opt.step(ps);
  // first Adam step moves by lr * g/(|g| + eps') ~= lr regardless of scale
  double g = 2.0;
  double m = (1 - cfg.beta1) * g / (1 - cfg.beta1);
  double v = (1 - cfg.beta2) * g * g / (1 - cfg.beta2);
  double expected = 1.0 - cfg.lr * m / (std::sqrt(v) + cfg.eps);
  CHECK(ps.at("w").var.value()[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(ps.at("frozen").var.value()[0] == 5.0);
}

TEST_CASE("checksum detects any single-bit parameter change") {
  ParamSet ps;
  Rng rng(6);
  ps.add("a", randn(rng, {4, 4}));
  ps.add("b", randn(rng, {4}));
  uint64_t before = ps.checksum_all();
  CHECK(before == ps.checksum_all());
  auto& x = ps.at("b").var.mutable_value().vec()[2];
  x = std::nextafter(x, 1e9);  // one-ulp change
  CHECK(before != ps.checksum_all());
}

TEST_CASE("paramset rejects duplicates and unknown lookups") {
  ParamSet ps;
  ps.add("w", Tensor::scalar(1.0));
  CHECK_THROWS(ps.add("w", Tensor::scalar(2.0)));
  CHECK_THROWS(ps.at("missing"));
  CHECK(ps.trainable_elements() == 1);
}
