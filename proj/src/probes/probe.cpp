#include "codescope/probes/probe.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace codescope::probes {

using nc::Tensor;
using nc::Var;

namespace {

// Per-split feature bank: for each layer l, one [N x d] matrix of frozen
// features (pooled snippets, or flattened token rows for the lexical task).
struct SplitFeats {
  std::vector<Tensor> a;  // L+1 matrices
  std::vector<Tensor> b;  // pair second element (syntactic), else empty
  std::vector<int> labels;
  int64_t size() const { return static_cast<int64_t>(labels.size()); }
};

std::vector<Tensor> pooled_layers(const model::ActivationTrace& t) {
  std::vector<Tensor> out;
  out.reserve(t.h.size());
  for (const auto& h : t.h) {
    const Tensor& m = h.value();
    Tensor v({m.cols()});
    for (int64_t r = 0; r < m.rows(); ++r)
      for (int64_t c = 0; c < m.cols(); ++c) v[c] += m.at(r, c);
    if (m.rows() > 0)
      for (int64_t c = 0; c < m.cols(); ++c) v[c] /= static_cast<double>(m.rows());
    out.push_back(std::move(v));
  }
  return out;
}

SplitFeats build_feats(const model::EncoderParams& m,
                       const std::vector<ProbeExample>& part, ProbeTask task) {
  const int64_t L1 = m.config.num_layers + 1;
  const int64_t d = m.config.hidden_dim;
  SplitFeats f;
  std::vector<std::vector<double>> acc_a(static_cast<size_t>(L1));
  std::vector<std::vector<double>> acc_b(static_cast<size_t>(L1));
  for (const auto& ex : part) {
    auto tr = model::forward(ex.tokens, m, model::AttentionMode::Bidirectional,
                             m.config.num_layers);
    if (task == ProbeTask::Lexical) {
      for (size_t i = 0; i < ex.tokens.size(); ++i) {
        if (ex.token_labels[i] < 0) continue;
        for (int64_t l = 0; l < L1; ++l) {
          const Tensor& h = tr.h[static_cast<size_t>(l)].value();
          for (int64_t c = 0; c < d; ++c)
            acc_a[static_cast<size_t>(l)].push_back(
                h.at(static_cast<int64_t>(i), c));
        }
        f.labels.push_back(ex.token_labels[i]);
      }
    } else {
      auto pa = pooled_layers(tr);
      for (int64_t l = 0; l < L1; ++l)
        acc_a[static_cast<size_t>(l)].insert(acc_a[static_cast<size_t>(l)].end(),
                                             pa[static_cast<size_t>(l)].vec().begin(),
                                             pa[static_cast<size_t>(l)].vec().end());
      if (task == ProbeTask::Syntactic) {
        auto trb = model::forward(ex.tokens_b, m,
                                  model::AttentionMode::Bidirectional,
                                  m.config.num_layers);
        auto pb = pooled_layers(trb);
        for (int64_t l = 0; l < L1; ++l)
          acc_b[static_cast<size_t>(l)].insert(
              acc_b[static_cast<size_t>(l)].end(),
              pb[static_cast<size_t>(l)].vec().begin(),
              pb[static_cast<size_t>(l)].vec().end());
      }
      f.labels.push_back(ex.label);
    }
  }
  const int64_t n = f.size();
  for (int64_t l = 0; l < L1; ++l) {
    f.a.emplace_back(std::vector<int64_t>{n, d}, std::move(acc_a[static_cast<size_t>(l)]));
    if (task == ProbeTask::Syntactic)
      f.b.emplace_back(std::vector<int64_t>{n, d}, std::move(acc_b[static_cast<size_t>(l)]));
  }
  return f;
}

Tensor gather_rows(const Tensor& m, const std::vector<int64_t>& idx) {
  Tensor out({static_cast<int64_t>(idx.size()), m.cols()});
  for (size_t r = 0; r < idx.size(); ++r)
    for (int64_t c = 0; c < m.cols(); ++c)
      out.at(static_cast<int64_t>(r), c) = m.at(idx[r], c);
  return out;
}

// Mixed feature batch: sum_l lambda_l * X_l with lambda = softmax(logits).
Var mix(const Var& lam, const std::vector<Tensor>& layers,
        const std::vector<int64_t>& idx) {
  std::vector<Var> terms;
  const int64_t L1 = static_cast<int64_t>(layers.size());
  for (int64_t l = 0; l < L1; ++l) {
    Tensor oh({L1});
    oh[l] = 1.0;
    Var coeff = nc::dot(lam, Var::constant(std::move(oh)));
    terms.push_back(nc::mul_scalar(
        coeff, Var::constant(gather_rows(layers[static_cast<size_t>(l)], idx))));
  }
  return nc::add_many(terms);
}

std::vector<int64_t> all_indices(int64_t n) {
  std::vector<int64_t> v(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) v[static_cast<size_t>(i)] = i;
  return v;
}

struct ProbeHead {
  nc::ParamSet ps;
  Var logits_var;  // mixer logits leaf, length L+1

  Var lam() const { return nc::softmax(logits_var); }
};

// Builds classification logits for the CE tasks.
Var head_logits(ProbeTask task, const ProbeHead& h, const SplitFeats& f,
                const std::vector<int64_t>& idx) {
  Var lam = h.lam();
  if (task == ProbeTask::Syntactic) {
    Var u = mix(lam, f.a, idx);
    Var v = mix(lam, f.b, idx);
    Var z = nc::concat_cols({u, v, nc::abs(nc::sub(u, v)), nc::mul(u, v)});
    return nc::add_rowvec(nc::matmul(z, h.ps.at("head.w").var),
                          h.ps.at("head.b").var);
  }
  Var x = mix(lam, f.a, idx);
  return nc::add_rowvec(nc::matmul(x, h.ps.at("head.w").var),
                        h.ps.at("head.b").var);
}

Var semantic_embed(const ProbeHead& h, const SplitFeats& f,
                   const std::vector<int64_t>& idx) {
  return nc::matmul(mix(h.lam(), f.a, idx), h.ps.at("head.w").var);
}

// Supervised in-batch contrastive loss over cluster labels.
Var contrastive_loss(const ProbeHead& h, const SplitFeats& f,
                     const std::vector<int64_t>& idx, double tau) {
  Var emb = semantic_embed(h, f, idx);
  const int64_t B = static_cast<int64_t>(idx.size());
  std::vector<Var> rows;
  for (int64_t i = 0; i < B; ++i) rows.push_back(nc::row(emb, i));
  std::vector<Var> losses;
  for (int64_t i = 0; i < B; ++i) {
    std::vector<Var> sims;
    Tensor mask({B - 1});
    int64_t k = 0, positives = 0;
    for (int64_t j = 0; j < B; ++j) {
      if (j == i) continue;
      sims.push_back(nc::scale(
          nc::cosine_similarity(rows[static_cast<size_t>(i)],
                                rows[static_cast<size_t>(j)]),
          1.0 / tau));
      if (f.labels[static_cast<size_t>(idx[static_cast<size_t>(j)])] ==
          f.labels[static_cast<size_t>(idx[static_cast<size_t>(i)])]) {
        mask[k] = 1.0;
        ++positives;
      }
      ++k;
    }
    if (positives == 0) continue;  // no in-batch positive for this anchor
    Var p = nc::softmax(nc::concat(sims));
    Var hit = nc::add(nc::dot(p, Var::constant(mask)),
                      Var::constant(Tensor::scalar(1e-12)));
    losses.push_back(nc::scale(nc::log(hit), -1.0));
  }
  if (losses.empty()) return Var();
  return nc::scale(nc::add_many(losses),
                   1.0 / static_cast<double>(losses.size()));
}

std::vector<int> predict(ProbeTask task, const ProbeHead& h, const SplitFeats& f) {
  std::vector<int> preds;
  const int64_t n = f.size();
  for (int64_t start = 0; start < n; start += 256) {
    std::vector<int64_t> idx;
    for (int64_t i = start; i < std::min(n, start + 256); ++i) idx.push_back(i);
    Var logits = head_logits(task, h, f, idx);
    const Tensor& lv = logits.value();
    for (int64_t r = 0; r < lv.rows(); ++r) {
      int best = 0;
      for (int64_t c = 1; c < lv.cols(); ++c)
        if (lv.at(r, c) > lv.at(r, best)) best = static_cast<int>(c);
      preds.push_back(best);
    }
  }
  return preds;
}

double eval_split(ProbeTask task, const ProbeHead& h, const SplitFeats& f) {
  if (f.size() == 0) return 0.0;
  if (task == ProbeTask::Semantic) {
    Var emb = semantic_embed(h, f, all_indices(f.size()));
    std::vector<Tensor> vecs;
    for (int64_t i = 0; i < f.size(); ++i) {
      Tensor v({emb.value().cols()});
      for (int64_t c = 0; c < emb.value().cols(); ++c) v[c] = emb.value().at(i, c);
      vecs.push_back(std::move(v));
    }
    return eval_map(vecs, f.labels).map;
  }
  return eval_accuracy(predict(task, h, f), f.labels);
}

ProbeHead make_head(const ProbeDataset& ds, int64_t L1, int64_t d, nc::Rng& rng) {
  ProbeHead h;
  h.logits_var = h.ps.add("mixer.logits", Tensor::zeros({L1}));
  int64_t in_dim = ds.task == ProbeTask::Syntactic ? 4 * d : d;
  int64_t out_dim = ds.task == ProbeTask::Semantic ? d
                    : static_cast<int64_t>(ds.num_classes);
  Tensor w({in_dim, out_dim});
  for (auto& x : w.vec()) x = rng.truncated_normal(0.02);
  h.ps.add("head.w", std::move(w));
  if (ds.task != ProbeTask::Semantic) h.ps.add("head.b", Tensor::zeros({out_dim}));
  return h;
}

}  // namespace

std::vector<double> uniform_lambda(int num_layers) {
  return std::vector<double>(static_cast<size_t>(num_layers) + 1,
                             1.0 / (num_layers + 1));
}

ProbeReport train_probe(const model::EncoderParams& m, const ProbeDataset& ds,
                        const ProbeConfig& cfg, const std::string& source) {
  const uint64_t checksum_before = m.set.checksum_all();
  const int64_t L1 = m.config.num_layers + 1;
  const int64_t d = m.config.hidden_dim;

  SplitFeats train_f = build_feats(m, ds.train, ds.task);
  SplitFeats valid_f = build_feats(m, ds.valid, ds.task);
  SplitFeats test_f = build_feats(m, ds.test, ds.task);
  if (train_f.size() == 0) throw std::invalid_argument("empty probe training set");

  ProbeReport rep;
  rep.task = probe_task_name(ds.task);
  rep.source = source;
  rep.seeds = cfg.seeds;
  rep.lambda.assign(static_cast<size_t>(L1), 0.0);

  for (uint64_t seed : cfg.seeds) {
    nc::Rng rng(seed);
    ProbeHead h = make_head(ds, L1, d, rng);
    nc::Adam opt({cfg.lr});
    double best_valid = -1.0;
    int since_best = 0;
    std::map<std::string, Tensor> best_params;

    auto snapshot = [&]() {
      best_params.clear();
      for (const auto& p : h.ps.all()) best_params[p.name] = p.var.value();
    };
    snapshot();

    std::vector<int64_t> order = all_indices(train_f.size());
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
      rng.shuffle(order);
      for (int64_t start = 0; start < train_f.size(); start += cfg.batch_size) {
        std::vector<int64_t> idx(
            order.begin() + start,
            order.begin() + std::min<int64_t>(train_f.size(),
                                              start + cfg.batch_size));
        if (idx.size() < 2) continue;
        Var loss;
        if (ds.task == ProbeTask::Semantic) {
          loss = contrastive_loss(h, train_f, idx, cfg.contrastive_tau);
          if (!loss.defined()) continue;
        } else {
          std::vector<int64_t> targets;
          for (int64_t i : idx)
            targets.push_back(train_f.labels[static_cast<size_t>(i)]);
          loss = nc::cross_entropy(head_logits(ds.task, h, train_f, idx), targets);
        }
        h.ps.zero_grads();
        nc::backward(loss);
        opt.step(h.ps);
      }
      double v = eval_split(ds.task, h, valid_f);
      if (v > best_valid + 1e-12) {
        best_valid = v;
        since_best = 0;
        snapshot();
      } else if (++since_best >= cfg.patience) {
        break;  // early stopping on the validation set
      }
    }
    for (auto& p : h.ps.all()) p.var.mutable_value() = best_params.at(p.name);

    rep.per_seed_metric.push_back(eval_split(ds.task, h, test_f));
    Tensor lam = h.lam().value();
    int argmax = 0;
    for (int64_t l = 0; l < L1; ++l) {
      rep.lambda[static_cast<size_t>(l)] += lam[l] / static_cast<double>(cfg.seeds.size());
      if (lam[l] > lam[argmax]) argmax = static_cast<int>(l);
    }
    rep.argmax_layer_per_seed.push_back(argmax);
  }

  double sum = 0.0;
  for (double v : rep.per_seed_metric) sum += v;
  rep.metric = sum / static_cast<double>(rep.per_seed_metric.size());
  rep.model_checksum = m.set.checksum_all();
  if (rep.model_checksum != checksum_before)
    throw std::logic_error("frozen-feature contract violated: model changed");
  return rep;
}

std::string report_json(const ProbeReport& r, const std::string& config_hash) {
  nlohmann::json j;
  j["task"] = r.task;
  j["source"] = r.source;
  j["metric"] = r.metric;
  j["per_seed_metric"] = r.per_seed_metric;
  j["lambda"] = r.lambda;
  j["argmax_layer_per_seed"] = r.argmax_layer_per_seed;
  j["seeds"] = r.seeds;
  j["config_hash"] = config_hash;
  return j.dump(2);
}

}  // namespace codescope::probes
