#include "codescope/telly/tasks.hpp"

#include "codescope/corpus/splits.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace codescope::telly {

using nc::Tensor;
using nc::Var;

namespace {
void clamp_len(std::vector<int64_t>& toks, int64_t max_len) {
  if (max_len > 0 && static_cast<int64_t>(toks.size()) > max_len)
    toks.resize(static_cast<size_t>(max_len));
}
}  // namespace

const char* task_name(TaskKind k) {
  switch (k) {
    case TaskKind::Search: return "search";
    case TaskKind::Clone: return "clone";
    case TaskKind::Completion: return "completion";
  }
  return "?";
}

// ---------- data builders ----------

TaskSplits<SearchExample> build_search_data(
    const std::vector<corpus::CorpusRecord>& records,
    const corpus::Vocabulary& vocab, int64_t max_len) {
  TaskSplits<SearchExample> out;
  corpus::Splits sp = corpus::make_splits(records, {});
  auto conv = [&](const std::vector<corpus::CorpusRecord>& part,
                  std::vector<SearchExample>& dst) {
    for (const auto& r : part) {
      SearchExample e{vocab.encode(r.code), vocab.encode(r.doc)};
      clamp_len(e.code, max_len);
      clamp_len(e.query, max_len);
      if (!e.code.empty() && !e.query.empty()) dst.push_back(std::move(e));
    }
  };
  conv(sp.train, out.train);
  conv(sp.valid, out.valid);
  conv(sp.test, out.test);
  return out;
}

TaskSplits<CloneExample> build_clone_data(
    const std::vector<std::vector<corpus::CorpusRecord>>& clusters,
    const corpus::Vocabulary& vocab, nc::Rng& rng, int64_t max_len) {
  if (clusters.size() < 2)
    throw std::invalid_argument("need >= 2 clusters for clone negatives");
  // variants partitioned across splits first (same rule as semantic probing)
  struct Part {
    std::vector<std::pair<size_t, std::vector<int64_t>>> items;  // (cluster, toks)
  };
  Part parts[3];
  for (size_t c = 0; c < clusters.size(); ++c) {
    const size_t S = clusters[c].size();
    // block split so valid/test each keep >= 2 variants (pairable); small
    // clusters contribute to training only
    size_t hold = S >= 6 ? std::max<size_t>(2, S / 5) : 0;
    for (size_t i = 0; i < S; ++i) {
      int slot = 0;
      if (hold > 0) {
        if (i >= S - hold) slot = 2;
        else if (i >= S - 2 * hold) slot = 1;
      }
      std::vector<int64_t> toks = vocab.encode(clusters[c][i].code);
      clamp_len(toks, max_len);
      parts[slot].items.emplace_back(c, std::move(toks));
    }
  }
  TaskSplits<CloneExample> out;
  std::vector<CloneExample>* dsts[3] = {&out.train, &out.valid, &out.test};
  for (int s = 0; s < 3; ++s) {
    auto& items = parts[s].items;
    std::vector<CloneExample>& dst = *dsts[s];
    // positives: consecutive same-cluster pairs; negatives: random cross-cluster
    for (size_t i = 0; i + 1 < items.size(); ++i)
      for (size_t j = i + 1; j < items.size(); ++j)
        if (items[i].first == items[j].first)
          dst.push_back({items[i].second, items[j].second, 1});
    size_t positives = dst.size(), negatives = 0;
    int guard = 0;
    while (negatives < positives && guard++ < 100000) {
      size_t i = static_cast<size_t>(rng.uniform_int(static_cast<int64_t>(items.size())));
      size_t j = static_cast<size_t>(rng.uniform_int(static_cast<int64_t>(items.size())));
      if (items[i].first == items[j].first) continue;
      dst.push_back({items[i].second, items[j].second, 0});
      ++negatives;
    }
    // trim excess positives if negatives were starved
    while (negatives < positives) {
      dst.erase(dst.begin());
      --positives;
    }
  }
  return out;
}

TaskSplits<CompletionExample> build_completion_data(
    const std::vector<corpus::CorpusRecord>& records,
    const corpus::Vocabulary& vocab, int64_t max_len) {
  TaskSplits<CompletionExample> out;
  corpus::Splits sp = corpus::make_splits(records, {});
  auto conv = [&](const std::vector<corpus::CorpusRecord>& part,
                  std::vector<CompletionExample>& dst) {
    for (const auto& r : part) {
      std::vector<int64_t> toks = vocab.encode(r.code);
      clamp_len(toks, max_len);
      // context = first line incl. its break; target = second line
      size_t first_nl = 0;
      while (first_nl < toks.size() && toks[first_nl] != corpus::Vocabulary::kNewline)
        ++first_nl;
      if (first_nl + 1 >= toks.size()) continue;
      size_t second_nl = first_nl + 1;
      while (second_nl < toks.size() &&
             toks[second_nl] != corpus::Vocabulary::kNewline)
        ++second_nl;
      CompletionExample e;
      e.context.assign(toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(first_nl) + 1);
      e.full = toks;
      std::vector<int64_t> tgt(toks.begin() + static_cast<std::ptrdiff_t>(first_nl) + 1,
                               toks.begin() + static_cast<std::ptrdiff_t>(second_nl));
      e.target_line = vocab.decode(tgt);
      dst.push_back(std::move(e));
    }
  };
  conv(sp.train, out.train);
  conv(sp.valid, out.valid);
  conv(sp.test, out.test);
  return out;
}

// ---------- shared forward helpers ----------

namespace {

Var pooled_top(const model::EncoderParams& m, const std::vector<int64_t>& toks,
               model::AttentionMode mode, int detach_k) {
  auto tr = model::forward(toks, m, mode, detach_k);
  return nc::mean_rows(tr.h.back());
}

// Search embeds both sides through a trainable [d x d] projection when the
// search head is present, so even a fully frozen encoder can align the query
// and code spaces.
Var project_rows(const model::EncoderParams& m, const Var& rows) {
  if (!m.set.contains("head.proj")) return rows;
  return nc::matmul(rows, m.set.at("head.proj").var);
}

Tensor projected_embedding(const model::EncoderParams& m,
                           const std::vector<int64_t>& toks) {
  Var e = pooled_top(m, toks, model::AttentionMode::Bidirectional,
                     static_cast<int>(m.config.num_layers));
  return nc::row(project_rows(m, nc::stack_rows({e})), 0).value();
}

// Canonical pair order for the symmetric clone features.
bool canonical_before(const Tensor& u, const Tensor& v) {
  return u.vec() <= v.vec();
}

Var clone_features(const model::EncoderParams& m, const std::vector<int64_t>& a,
                   const std::vector<int64_t>& b, int detach_k) {
  Var u = pooled_top(m, a, model::AttentionMode::Bidirectional, detach_k);
  Var v = pooled_top(m, b, model::AttentionMode::Bidirectional, detach_k);
  if (!canonical_before(u.value(), v.value())) std::swap(u, v);
  return nc::concat({u, v, nc::abs(nc::sub(u, v)), nc::mul(u, v)});
}

Var clone_logit_batch(const model::EncoderParams& m, const Var& feats /*[B x 4d]*/) {
  Var h = nc::gelu(nc::add_rowvec(nc::matmul(feats, m.set.at("head.w1").var),
                                  m.set.at("head.b1").var));
  return nc::add_rowvec(nc::matmul(h, m.set.at("head.w2").var),
                        m.set.at("head.b2").var);  // [B x 1]
}

int64_t head_param_count(const model::EncoderParams& m) {
  int64_t n = 0;
  for (const auto& p : m.set.all())
    if (model::group_of(p.name) < 0) n += p.var.value().numel();
  return n;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Generic fine-tuning scaffold shared by the three tasks. `run_epoch` trains
// one pass; `valid_metric` scores the validation split (higher is better);
// `test_metrics` fills the report's metric map after best-epoch restore.
struct Harness {
  const FinetuneConfig& cfg;
  RunReport rep;
  model::EncoderParams* trained = nullptr;

  template <class AddHead, class RunEpoch, class ValidMetric, class TestMetrics>
  void run(const model::EncoderParams& base, int k, AddHead add_head,
           RunEpoch run_epoch, ValidMetric valid_metric, TestMetrics test_metrics) {
    rep.k = k;
    rep.seeds = cfg.seeds;
    std::map<std::string, double> metric_sums;
    double epoch_s_sum = 0.0, conv_s_sum = 0.0;
    for (uint64_t seed : cfg.seeds) {
      nc::Rng rng(seed);
      model::EncoderParams m = model::clone_params(base);
      if (k >= 0) apply_freeze(m, k);
      else
        for (auto& p : m.set.all()) p.trainable = true;
      add_head(m, rng);
      uint64_t frozen_before = k >= 0 ? frozen_checksum(m, k) : 0;
      rep.head_params = head_param_count(m);
      rep.params_trainable = m.set.trainable_elements();

      nc::Adam opt({cfg.lr});
      double best = -1e300;
      int best_epoch = -1, since_best = 0;
      std::map<std::string, Tensor> snapshot;
      auto take_snapshot = [&]() {
        snapshot.clear();
        for (const auto& p : m.set.all())
          if (p.trainable) snapshot[p.name] = p.var.value();
      };
      take_snapshot();
      std::vector<double> epoch_times;
      double warmup_time = 0.0;
      auto t0 = Clock::now();
      double conv_time = 0.0;
      for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        auto te = Clock::now();
        run_epoch(m, opt, rng, k);
        if (epoch > 0)  // first epoch is warm-up for timing purposes
          epoch_times.push_back(seconds_since(te));
        else
          warmup_time = seconds_since(te);
        double v = valid_metric(m);
        if (v > best + 1e-12) {
          best = v;
          best_epoch = epoch;
          since_best = 0;
          conv_time = seconds_since(t0);
          take_snapshot();
        } else if (++since_best >= cfg.patience) {
          break;
        }
      }
      (void)best_epoch;
      for (auto& p : m.set.all())
        if (p.trainable) p.var.mutable_value() = snapshot.at(p.name);
      if (k >= 0 && frozen_checksum(m, k) != frozen_before)
        throw std::logic_error("frozen-parameter drift detected after training");
      if (!epoch_times.empty()) {
        std::sort(epoch_times.begin(), epoch_times.end());
        size_t take = std::min<size_t>(epoch_times.size(),
                                       static_cast<size_t>(cfg.timed_epochs));
        epoch_s_sum += epoch_times[take / 2];
      } else {
        epoch_s_sum += warmup_time;  // single-epoch run: only sample we have
      }
      conv_s_sum += conv_time;
      for (const auto& [name, val] : test_metrics(m)) metric_sums[name] += val;
      if (trained && seed == cfg.seeds.front()) *trained = model::clone_params(m);
    }
    const double ns = static_cast<double>(cfg.seeds.size());
    rep.epoch_seconds = epoch_s_sum / ns;
    rep.convergence_seconds = conv_s_sum / ns;
    for (const auto& [name, sum] : metric_sums) rep.metrics[name] = sum / ns;
  }
};

template <class E>
std::vector<size_t> shuffled_indices(const std::vector<E>& v, nc::Rng& rng) {
  std::vector<size_t> idx(v.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<int64_t> tmp(idx.begin(), idx.end());
  rng.shuffle(tmp);
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<size_t>(tmp[i]);
  return idx;
}

}  // namespace

// ---------- search ----------

double search_score(const model::EncoderParams& m, const std::vector<int64_t>& code,
                    const std::vector<int64_t>& query) {
  return nc::cosine_similarity(projected_embedding(m, code),
                               projected_embedding(m, query));
}

std::vector<int> search_ranks(const model::EncoderParams& m,
                              const std::vector<SearchExample>& examples) {
  std::vector<Tensor> code_emb, query_emb;
  for (const auto& e : examples) {
    code_emb.push_back(projected_embedding(m, e.code));
    query_emb.push_back(projected_embedding(m, e.query));
  }
  std::vector<int> ranks;
  for (size_t i = 0; i < examples.size(); ++i) {
    double own = nc::cosine_similarity(query_emb[i], code_emb[i]);
    int rank = 1;
    for (size_t j = 0; j < examples.size(); ++j) {
      if (j == i) continue;
      if (nc::cosine_similarity(query_emb[i], code_emb[j]) > own) ++rank;
    }
    ranks.push_back(rank);
  }
  return ranks;
}

RunReport finetune_search(const model::EncoderParams& base,
                          const TaskSplits<SearchExample>& data, int k,
                          const FinetuneConfig& cfg, model::EncoderParams* trained) {
  Harness h{cfg, {}, trained};
  h.rep.task = task_name(TaskKind::Search);
  const int64_t d = base.config.hidden_dim;
  auto add_head = [d](model::EncoderParams& m, nc::Rng& rng) {
    // near-identity init: training starts from the pretrained geometry
    Tensor w({d, d});
    for (auto& x : w.vec()) x = rng.truncated_normal(0.02);
    for (int64_t i = 0; i < d; ++i) w.vec()[static_cast<size_t>(i * d + i)] += 1.0;
    m.set.add("head.proj", std::move(w));
  };
  auto run_epoch = [&](model::EncoderParams& m, nc::Adam& opt, nc::Rng& rng,
                       int kk) {
    auto order = shuffled_indices(data.train, rng);
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(cfg.batch_size)) {
      size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      if (end - start < 2) continue;
      std::vector<Var> code_emb, query_emb;
      for (size_t t = start; t < end; ++t) {
        const auto& e = data.train[order[t]];
        code_emb.push_back(
            pooled_top(m, e.code, model::AttentionMode::Bidirectional, kk));
        query_emb.push_back(
            pooled_top(m, e.query, model::AttentionMode::Bidirectional, kk));
      }
      const int64_t B = static_cast<int64_t>(code_emb.size());
      Var C = project_rows(m, nc::stack_rows(code_emb));
      Var Q = project_rows(m, nc::stack_rows(query_emb));
      std::vector<Var> rows;
      std::vector<int64_t> targets;
      for (int64_t i = 0; i < B; ++i) {
        std::vector<Var> sims;
        for (int64_t j = 0; j < B; ++j)
          sims.push_back(nc::scale(
              nc::cosine_similarity(nc::row(Q, i), nc::row(C, j)),
              1.0 / cfg.tau));
        rows.push_back(nc::concat(sims));
        targets.push_back(i);
      }
      Var loss = nc::cross_entropy(nc::stack_rows(rows), targets);
      m.set.zero_grads();
      nc::backward(loss);
      opt.step(m.set);
    }
  };
  auto valid_metric = [&](const model::EncoderParams& m) {
    return data.valid.empty() ? 0.0 : metric_mrr(search_ranks(m, data.valid));
  };
  auto test_metrics = [&](const model::EncoderParams& m) {
    auto ranks = search_ranks(m, data.test);
    return std::map<std::string, double>{
        {"mrr", metric_mrr(ranks)},
        {"r1", metric_recall_at_k(ranks, 1)},
        {"r5", metric_recall_at_k(ranks, 5)},
        {"r10", metric_recall_at_k(ranks, 10)}};
  };
  h.run(base, k, add_head, run_epoch, valid_metric, test_metrics);
  return h.rep;
}

// ---------- clone ----------

double clone_probability(const model::EncoderParams& m,
                         const std::vector<int64_t>& a,
                         const std::vector<int64_t>& b) {
  Var f = clone_features(m, a, b, m.config.num_layers);
  Var z = clone_logit_batch(m, nc::stack_rows({f}));
  return 1.0 / (1.0 + std::exp(-z.value()[0]));
}

namespace {

std::vector<int> clone_predictions(const model::EncoderParams& m,
                                   const std::vector<CloneExample>& part) {
  std::vector<int> preds;
  for (const auto& e : part)
    preds.push_back(clone_probability(m, e.a, e.b) > 0.5 ? 1 : 0);
  return preds;
}

}  // namespace

RunReport finetune_clone(const model::EncoderParams& base,
                         const TaskSplits<CloneExample>& data, int k,
                         const FinetuneConfig& cfg, model::EncoderParams* trained) {
  Harness h{cfg, {}, trained};
  h.rep.task = task_name(TaskKind::Clone);
  const int64_t d = base.config.hidden_dim;
  auto add_head = [d](model::EncoderParams& m, nc::Rng& rng) {
    Tensor w1({4 * d, d}), w2({d, 1});
    for (auto& x : w1.vec()) x = rng.truncated_normal(0.02);
    for (auto& x : w2.vec()) x = rng.truncated_normal(0.02);
    m.set.add("head.w1", std::move(w1));
    m.set.add("head.b1", Tensor::zeros({d}));
    m.set.add("head.w2", std::move(w2));
    m.set.add("head.b2", Tensor::zeros({1}));
  };
  auto run_epoch = [&](model::EncoderParams& m, nc::Adam& opt, nc::Rng& rng,
                       int kk) {
    auto order = shuffled_indices(data.train, rng);
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(cfg.batch_size)) {
      size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      std::vector<Var> feats;
      std::vector<int64_t> targets;
      for (size_t t = start; t < end; ++t) {
        const auto& e = data.train[order[t]];
        feats.push_back(clone_features(m, e.a, e.b, kk));
        targets.push_back(e.label);
      }
      if (feats.empty()) continue;
      Var z = clone_logit_batch(m, nc::stack_rows(feats));  // [B x 1]
      // two-class formulation of the sigmoid objective, stable under f32
      Var zeros = Var::constant(
          Tensor::zeros({static_cast<int64_t>(feats.size()), 1}));
      Var logits = nc::concat_cols({zeros, z});
      Var loss = nc::cross_entropy(logits, targets);
      m.set.zero_grads();
      nc::backward(loss);
      opt.step(m.set);
    }
  };
  auto valid_metric = [&](const model::EncoderParams& m) {
    std::vector<int> labels;
    for (const auto& e : data.valid) labels.push_back(e.label);
    return data.valid.empty()
               ? 0.0
               : metric_prf(clone_predictions(m, data.valid), labels).f1;
  };
  auto test_metrics = [&](const model::EncoderParams& m) {
    std::vector<int> labels;
    for (const auto& e : data.test) labels.push_back(e.label);
    Prf p = metric_prf(clone_predictions(m, data.test), labels);
    return std::map<std::string, double>{
        {"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
  };
  h.run(base, k, add_head, run_epoch, valid_metric, test_metrics);
  return h.rep;
}

// ---------- completion ----------

std::vector<int64_t> complete_line(const model::EncoderParams& m,
                                   const std::vector<int64_t>& context,
                                   int64_t newline_id, int max_len) {
  std::vector<int64_t> toks = context;
  std::vector<int64_t> out;
  const Tensor& W = m.set.at("head.lm").var.value();  // [d x V]
  for (int step = 0; step < max_len; ++step) {
    if (static_cast<int64_t>(toks.size()) > m.config.max_positions)
      toks.erase(toks.begin(),
                 toks.end() - static_cast<std::ptrdiff_t>(m.config.max_positions));
    auto tr = model::forward(toks, m, model::AttentionMode::Causal,
                             m.config.num_layers);
    const Tensor& top = tr.h.back().value();
    const int64_t n = top.rows();
    int64_t best = 0;
    double best_v = -1e300;
    for (int64_t v = 0; v < W.cols(); ++v) {
      double s = 0.0;
      for (int64_t c = 0; c < W.rows(); ++c) s += top.at(n - 1, c) * W.at(c, v);
      if (s > best_v) {
        best_v = s;
        best = v;
      }
    }
    out.push_back(best);
    if (best == newline_id) break;
    toks.push_back(best);
  }
  return out;
}

RunReport finetune_completion(const model::EncoderParams& base,
                              const TaskSplits<CompletionExample>& data, int k,
                              const FinetuneConfig& cfg,
                              const corpus::Vocabulary& vocab,
                              model::EncoderParams* trained) {
  Harness h{cfg, {}, trained};
  h.rep.task = task_name(TaskKind::Completion);
  auto add_head = [&base](model::EncoderParams& m, nc::Rng&) {
    // untied output head so it can train under every freeze level; warm
    // started from the embedding table
    const Tensor& emb = base.set.at("g0.tok_embed").var.value();  // [V x d]
    Tensor w({emb.cols(), emb.rows()});
    for (int64_t v = 0; v < emb.rows(); ++v)
      for (int64_t c = 0; c < emb.cols(); ++c) w.at(c, v) = emb.at(v, c);
    m.set.add("head.lm", std::move(w));
  };
  auto seq_loss = [](model::EncoderParams& m, const std::vector<int64_t>& toks,
                     int kk) -> Var {
    auto tr = model::forward(toks, m, model::AttentionMode::Causal, kk);
    const Var& top = tr.h.back();
    std::vector<Var> rows;
    std::vector<int64_t> targets;
    for (size_t i = 0; i + 1 < toks.size(); ++i) {
      rows.push_back(nc::row(top, static_cast<int64_t>(i)));
      targets.push_back(toks[i + 1]);
    }
    Var logits = nc::matmul(nc::stack_rows(rows), m.set.at("head.lm").var);
    return nc::cross_entropy(logits, targets);
  };
  auto run_epoch = [&](model::EncoderParams& m, nc::Adam& opt, nc::Rng& rng,
                       int kk) {
    auto order = shuffled_indices(data.train, rng);
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(cfg.batch_size)) {
      size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      std::vector<Var> losses;
      for (size_t t = start; t < end; ++t) {
        const auto& e = data.train[order[t]];
        if (e.full.size() < 2) continue;
        losses.push_back(seq_loss(m, e.full, kk));
      }
      if (losses.empty()) continue;
      Var loss = nc::scale(nc::add_many(losses),
                           1.0 / static_cast<double>(losses.size()));
      m.set.zero_grads();
      nc::backward(loss);
      opt.step(m.set);
    }
  };
  auto eval_part = [&](const model::EncoderParams& m,
                       const std::vector<CompletionExample>& part) {
    double es = 0.0, em = 0.0;
    for (const auto& e : part) {
      auto gen = complete_line(m, e.context, cfg.newline_id, cfg.max_generate);
      if (!gen.empty() && gen.back() == cfg.newline_id) gen.pop_back();
      std::string text = vocab.decode(gen);
      es += metric_edit_sim(text, e.target_line);
      em += metric_em(text, e.target_line);
    }
    double n = part.empty() ? 1.0 : static_cast<double>(part.size());
    return std::pair<double, double>{es / n, em / n};
  };
  auto valid_metric = [&](const model::EncoderParams& m) {
    return eval_part(m, data.valid).first;
  };
  auto test_metrics = [&](const model::EncoderParams& m) {
    auto [es, em] = eval_part(m, data.test);
    return std::map<std::string, double>{{"edit_sim", es}, {"em", em}};
  };
  h.run(base, k, add_head, run_epoch, valid_metric, test_metrics);
  return h.rep;
}

std::string run_report_json(const RunReport& r, const std::string& config_hash) {
  nlohmann::json j;
  j["task"] = r.task;
  j["k"] = r.k;
  j["params_trainable"] = r.params_trainable;
  j["head_params"] = r.head_params;
  j["params_reduction_pct"] = r.params_reduction_pct;
  j["epoch_seconds"] = r.epoch_seconds;
  j["epoch_seconds_noisy"] = true;
  j["convergence_seconds"] = r.convergence_seconds;
  j["convergence_seconds_noisy"] = true;
  j["metrics"] = r.metrics;
  j["delta_pct"] = r.delta_pct;
  j["seeds"] = r.seeds;
  j["failed"] = r.failed;
  if (!r.error.empty()) j["error"] = r.error;
  j["config_hash"] = config_hash;
  return j.dump(2);
}

}  // namespace codescope::telly
