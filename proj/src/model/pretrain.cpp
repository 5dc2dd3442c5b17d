#include "codescope/model/pretrain.hpp"

#include <stdexcept>

#include "codescope/numcore/ops.hpp"

namespace codescope::model {

PretrainResult pretrain_mlm(EncoderParams& params,
                            const std::vector<std::vector<int64_t>>& sequences,
                            const PretrainConfig& cfg,
                            const std::function<void(int, double)>& on_step) {
  if (sequences.empty()) throw std::invalid_argument("empty pretraining corpus");
  nc::Rng rng(cfg.seed);
  nc::Adam opt({cfg.lr});
  PretrainResult res;
  std::vector<int64_t> order(sequences.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int64_t>(i);
  size_t cursor = order.size();  // triggers a shuffle on first use

  for (int step = 0; step < cfg.steps;) {
    std::vector<std::vector<int64_t>> batch;
    while (batch.size() < static_cast<size_t>(cfg.batch_size)) {
      if (cursor >= order.size()) {
        rng.shuffle(order);
        cursor = 0;
      }
      batch.push_back(sequences[static_cast<size_t>(order[cursor++])]);
      auto& seq = batch.back();
      if (static_cast<int64_t>(seq.size()) > params.config.max_positions)
        seq.resize(static_cast<size_t>(params.config.max_positions));
    }
    auto loss = masked_lm_loss(batch, params, cfg.mask_prob, cfg.mask_id, rng);
    if (!loss) {
      ++res.skipped_batches;
      continue;
    }
    params.set.zero_grads();
    nc::backward(loss->loss);
    opt.step(params.set);
    res.loss_curve.push_back(loss->loss.item());
    if (on_step) on_step(step, res.loss_curve.back());
    ++step;
  }
  return res;
}

PretrainResult pretrain_align(
    EncoderParams& params,
    const std::vector<std::pair<std::vector<int64_t>, std::vector<int64_t>>>&
        pairs,
    const AlignConfig& cfg,
    const std::function<void(int, double)>& on_step) {
  if (pairs.empty()) throw std::invalid_argument("empty alignment corpus");
  nc::Rng rng(cfg.seed);
  nc::Adam opt({cfg.lr});
  PretrainResult res;
  std::vector<int64_t> order(pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int64_t>(i);
  size_t cursor = order.size();

  auto pooled = [&](const std::vector<int64_t>& toks) {
    auto ids = toks;
    if (static_cast<int64_t>(ids.size()) > params.config.max_positions)
      ids.resize(static_cast<size_t>(params.config.max_positions));
    auto tr = forward(ids, params, AttentionMode::Bidirectional);
    return nc::mean_rows(tr.h.back());
  };

  for (int step = 0; step < cfg.steps;) {
    std::vector<nc::Var> doc_emb, code_emb;
    while (doc_emb.size() < static_cast<size_t>(cfg.batch_size)) {
      if (cursor >= order.size()) {
        rng.shuffle(order);
        cursor = 0;
      }
      const auto& p = pairs[static_cast<size_t>(order[cursor++])];
      if (p.first.empty() || p.second.empty()) continue;
      doc_emb.push_back(pooled(p.first));
      code_emb.push_back(pooled(p.second));
    }
    const int64_t B = static_cast<int64_t>(doc_emb.size());
    if (B < 2) {
      ++res.skipped_batches;
      continue;
    }
    std::vector<nc::Var> rows;
    std::vector<int64_t> targets;
    for (int64_t i = 0; i < B; ++i) {
      std::vector<nc::Var> sims;
      for (int64_t j = 0; j < B; ++j)
        sims.push_back(
            nc::scale(nc::cosine_similarity(doc_emb[static_cast<size_t>(i)],
                                            code_emb[static_cast<size_t>(j)]),
                      1.0 / cfg.tau));
      rows.push_back(nc::concat(sims));
      targets.push_back(i);
    }
    nc::Var loss = nc::cross_entropy(nc::stack_rows(rows), targets);
    params.set.zero_grads();
    nc::backward(loss);
    opt.step(params.set);
    res.loss_curve.push_back(loss.item());
    if (on_step) on_step(step, res.loss_curve.back());
    ++step;
  }
  return res;
}

}  // namespace codescope::model
