#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "codescope/codeprops/parser.hpp"
#include "codescope/corpus/generator.hpp"
#include "codescope/probes/datasets.hpp"
#include "codescope/probes/metrics.hpp"
#include "codescope/probes/probe.hpp"

using namespace codescope;
using namespace codescope::probes;

namespace {

nc::Tensor vec(std::vector<double> v) {
  std::vector<int64_t> shape{static_cast<int64_t>(v.size())};
  return nc::Tensor(shape, std::move(v));
}

}  // namespace

TEST_CASE("accuracy counts exact matches and rejects length mismatch") {
  CHECK(eval_accuracy({1, 2, 3, 4}, {1, 0, 3, 4}) == doctest::Approx(0.75));
  CHECK(eval_accuracy({}, {}) == 0.0);
  CHECK_THROWS_AS(eval_accuracy({1}, {1, 2}), nc::DimensionError);
}

TEST_CASE("mean average precision matches a worked example") {
  // query q = (1,0); candidates ranked by cosine: a=(1,0.1) rel, b=(0.9,0.5)
  // not rel, c=(0.8,0.6) rel -> AP = (1/1 + 2/3)/2 = 0.8333...
  std::vector<nc::Tensor> embs = {vec({1, 0}), vec({1, 0.1}), vec({0.9, 0.5}),
                                  vec({0.8, 0.6})};
  std::vector<int> labels = {0, 0, 1, 0};
  auto r = eval_map(embs, labels);
  CHECK(r.queries == 3);  // the singleton b is skipped as a query
  CHECK(r.skipped == 1);
  // q's AP = (1 + 2/3)/2; a's AP: ranking for a is q first then c -> same;
  // c's AP: nearest is b (irrelevant), then q, a -> (1/2 + 2/3)/2
  double expect = ((1.0 + 2.0 / 3.0) / 2 + (1.0 + 2.0 / 3.0) / 2 +
                   (1.0 / 2.0 + 2.0 / 3.0) / 2) /
                  3.0;
  CHECK(r.map == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("map on perfectly clustered embeddings is 1") {
  std::vector<nc::Tensor> embs = {vec({1, 0}), vec({2, 0}), vec({0, 1}),
                                  vec({0, 3})};
  std::vector<int> labels = {0, 0, 1, 1};
  CHECK(eval_map(embs, labels).map == doctest::Approx(1.0));
}

TEST_CASE("lexical dataset aligns labels with encoded positions") {
  auto recs = corpus::generate_toy_corpus(1, 60);
  auto vocab = corpus::Vocabulary::build(recs, 1);
  auto ds = build_lexical_dataset(recs, vocab);
  CHECK(ds.task == ProbeTask::Lexical);
  CHECK(ds.num_classes == 5);
  CHECK(!ds.train.empty());
  CHECK(!ds.valid.empty());
  CHECK(!ds.test.empty());
  for (const auto* part : {&ds.train, &ds.valid, &ds.test}) {
    for (const auto& ex : *part) {
      REQUIRE(ex.tokens.size() == ex.token_labels.size());
      CHECK(ex.tokens.size() <= 128);
      for (size_t i = 0; i < ex.tokens.size(); ++i) {
        if (ex.tokens[i] == corpus::Vocabulary::kNewline)
          CHECK(ex.token_labels[i] == -1);
        else {
          CHECK(ex.token_labels[i] >= 0);
          CHECK(ex.token_labels[i] < 5);
        }
      }
    }
  }
}

TEST_CASE("syntactic dataset is balanced with true shape matches") {
  auto recs = corpus::generate_toy_corpus(2, 80);
  auto vocab =
      corpus::Vocabulary::build(with_ast_records(recs), 1);
  nc::Rng rng(7);
  auto ds = build_syntactic_dataset(recs, vocab, rng);
  CHECK(ds.num_classes == 2);
  for (const auto* part : {&ds.train, &ds.valid, &ds.test}) {
    int pos = 0, neg = 0;
    for (const auto& ex : *part) {
      CHECK(!ex.tokens.empty());
      CHECK(!ex.tokens_b.empty());
      CHECK(ex.tokens.size() <= 128);
      CHECK(ex.tokens_b.size() <= 128);
      (ex.label == 1 ? pos : neg)++;
    }
    CHECK(pos == neg);
  }
  // positives pair a snippet with its own serialized shape; negatives with a
  // shape that differs after encoding + truncation
  auto clamp = [](std::vector<int64_t> v) {
    if (v.size() > 128) v.resize(128);
    return v;
  };
  for (const auto& ex : ds.train) {
    // find the source record by matching encoded code
    for (const auto& r : recs) {
      if (clamp(vocab.encode(r.code)) != ex.tokens) continue;
      auto own = clamp(vocab.encode(
          props::serialize_ast(*props::ast_only(*props::parse(r.code)))));
      if (ex.label == 1)
        CHECK(ex.tokens_b == own);
      else
        CHECK(ex.tokens_b != own);
      break;
    }
  }
}

TEST_CASE("alignment pairs encode docstring and code, skipping docless records") {
  auto recs = corpus::generate_toy_corpus(1, 20);
  auto vocab = corpus::Vocabulary::build(recs, 1);
  size_t with_doc = 0;
  for (const auto& r : recs)
    if (!r.doc.empty()) ++with_doc;
  REQUIRE(with_doc > 0);

  auto pairs = build_align_pairs(recs, vocab, 12);
  CHECK(pairs.size() == with_doc);
  for (const auto& [doc, code] : pairs) {
    CHECK(!doc.empty());
    CHECK(!code.empty());
    CHECK(doc.size() <= 12);
    CHECK(code.size() <= 12);
  }
  auto doc0 = vocab.encode(recs[0].doc);
  if (doc0.size() > 12) doc0.resize(12);
  CHECK(pairs[0].first == doc0);

  auto docless = recs;
  docless[0].doc.clear();
  CHECK(build_align_pairs(docless, vocab, 12).size() == with_doc - 1);
}

TEST_CASE("semantic dataset labels variants by problem") {
  auto clusters = corpus::generate_semantic_clusters(4, 10, 3);
  std::vector<corpus::CorpusRecord> flat;
  for (const auto& c : clusters) flat.insert(flat.end(), c.begin(), c.end());
  auto vocab = corpus::Vocabulary::build(flat, 1);
  auto ds = build_semantic_dataset(clusters, vocab);
  CHECK(ds.num_classes == 4);
  size_t total = ds.train.size() + ds.valid.size() + ds.test.size();
  CHECK(total == flat.size());
  // every split keeps at least two members of some cluster, so retrieval
  // has relevant items to find
  for (const auto* part : {&ds.valid, &ds.test}) {
    std::map<int, int> sz;
    for (const auto& ex : *part) sz[ex.label]++;
    bool pair = false;
    for (auto [l, n] : sz) pair = pair || n >= 2;
    CHECK(pair);
  }
}

TEST_CASE("structural dataset buckets by measured complexity") {
  auto recs = corpus::generate_toy_corpus(3, 120);
  auto vocab = corpus::Vocabulary::build(recs, 1);
  auto ds = build_structural_dataset(recs, vocab);
  CHECK(ds.num_classes == 10);
  std::set<int> seen;
  for (const auto* part : {&ds.train, &ds.valid, &ds.test}) {
    for (const auto& ex : *part) {
      CHECK(ex.label >= 0);
      CHECK(ex.label <= 9);
      seen.insert(ex.label);
    }
  }
  CHECK(seen.size() >= 3);  // the generator spans several buckets
  // spot-check: label equals min(complexity, 10) - 1
  for (const auto& r : recs) {
    auto ids = vocab.encode(r.code);
    if (ids.size() > 128) ids.resize(128);
    for (const auto& ex : ds.train)
      if (ex.tokens == ids)
        CHECK(ex.label == std::min<int64_t>(r.complexity, 10) - 1);
  }
}

TEST_CASE("uniform lambda is the zero-logit softmax") {
  auto lam = uniform_lambda(4);
  REQUIRE(lam.size() == 5);
  for (double l : lam) CHECK(l == doctest::Approx(0.2));
}

TEST_CASE("probe training learns separable toy data and freezes the model") {
  // tiny encoder; structural probe over a small corpus
  auto recs = corpus::generate_toy_corpus(5, 60);
  auto vocab = corpus::Vocabulary::build(recs, 1);
  model::ModelConfig cfg;
  cfg.num_layers = 2;
  cfg.hidden_dim = 16;
  cfg.ffn_dim = 32;
  cfg.num_heads = 2;
  cfg.vocab_size = static_cast<int64_t>(vocab.size());
  cfg.max_positions = 128;
  nc::Rng rng(1);
  auto m = model::init_params(cfg, rng);
  uint64_t before = m.set.checksum_all();

  auto ds = build_structural_dataset(recs, vocab);
  ProbeConfig pc;
  pc.max_epochs = 8;
  pc.patience = 3;
  pc.lr = 3e-3;
  pc.seeds = {0};
  auto rep = train_probe(m, ds, pc, "random");
  CHECK(rep.task == std::string("structural"));
  CHECK(rep.source == "random");
  CHECK(rep.metric >= 0.0);
  CHECK(rep.metric <= 1.0);
  REQUIRE(rep.lambda.size() == static_cast<size_t>(cfg.num_layers) + 1);
  double lsum = 0;
  for (double l : rep.lambda) {
    CHECK(l >= 0.0);
    lsum += l;
  }
  CHECK(lsum == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.per_seed_metric.size() == pc.seeds.size());
  CHECK(rep.argmax_layer_per_seed.size() == pc.seeds.size());
  // frozen-feature contract: the encoder is untouched
  CHECK(m.set.checksum_all() == before);
  CHECK(rep.model_checksum == before);
}

TEST_CASE("probe report serializes to json with the expected fields") {
  ProbeReport r;
  r.task = "lexical";
  r.source = "pretrained";
  r.metric = 0.5;
  r.per_seed_metric = {0.5};
  r.lambda = {0.25, 0.25, 0.25, 0.25};
  r.argmax_layer_per_seed = {2};
  r.seeds = {0};
  r.model_checksum = 42;
  auto s = report_json(r, "deadbeef");
  CHECK(s.find("\"task\"") != std::string::npos);
  CHECK(s.find("lexical") != std::string::npos);
  CHECK(s.find("config_hash") != std::string::npos);
  CHECK(s.find("deadbeef") != std::string::npos);
  CHECK(s.find("lambda") != std::string::npos);
}
