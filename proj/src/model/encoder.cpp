#include "codescope/model/encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace codescope::model {

using nc::Var;

namespace {

std::string gp(int g, const std::string& rest) {
  return "g" + std::to_string(g) + "." + rest;
}

Var pget(const EncoderParams& p, int g, const std::string& rest, bool no_grad) {
  const Var& v = p.set.at(gp(g, rest)).var;
  return no_grad ? v.detach() : v;
}

}  // namespace

Var embed(const std::vector<int64_t>& tokens, const EncoderParams& p) {
  const auto& cfg = p.config;
  if (static_cast<int64_t>(tokens.size()) > cfg.max_positions)
    throw std::invalid_argument("sequence longer than max_positions");
  for (int64_t t : tokens)
    if (t < 0 || t >= cfg.vocab_size)
      throw std::invalid_argument("token id out of range");
  if (tokens.empty())
    return Var::constant(nc::Tensor::zeros({0, cfg.hidden_dim}));
  std::vector<int64_t> positions(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) positions[i] = static_cast<int64_t>(i);
  Var w = nc::add(nc::embedding_rows(p.set.at(gp(0, "tok_embed")).var, tokens),
                  nc::embedding_rows(p.set.at(gp(0, "pos_embed")).var, positions));
  return nc::layer_norm(w, p.set.at(gp(0, "ln.gain")).var,
                        p.set.at(gp(0, "ln.bias")).var);
}

Var layer_forward(const Var& x_in, const EncoderParams& p, int layer,
                  AttentionMode mode, bool no_grad) {
  const auto& cfg = p.config;
  if (layer < 1 || layer > cfg.num_layers)
    throw std::invalid_argument("layer index out of range");
  Var x = no_grad ? x_in.detach() : x_in;
  const int64_t n = x.value().rows();
  const int64_t d = cfg.hidden_dim;
  const int64_t heads = cfg.num_heads;
  const int64_t dh = d / heads;

  Var q = nc::add_rowvec(nc::matmul(x, pget(p, layer, "attn.wq", no_grad)),
                         pget(p, layer, "attn.bq", no_grad));
  Var k = nc::add_rowvec(nc::matmul(x, pget(p, layer, "attn.wk", no_grad)),
                         pget(p, layer, "attn.bk", no_grad));
  Var v = nc::add_rowvec(nc::matmul(x, pget(p, layer, "attn.wv", no_grad)),
                         pget(p, layer, "attn.bv", no_grad));

  Var causal_bias;
  if (mode == AttentionMode::Causal) {
    nc::Tensor m = nc::Tensor::zeros({n, n});
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = i + 1; j < n; ++j) m.at(i, j) = -1e9;
    causal_bias = Var::constant(std::move(m));
  }

  std::vector<Var> head_outs;
  head_outs.reserve(static_cast<size_t>(heads));
  for (int64_t h = 0; h < heads; ++h) {
    Var qh = nc::slice_cols(q, h * dh, (h + 1) * dh);
    Var kh = nc::slice_cols(k, h * dh, (h + 1) * dh);
    Var vh = nc::slice_cols(v, h * dh, (h + 1) * dh);
    Var scores = nc::scale(nc::matmul(qh, nc::transpose(kh)),
                           1.0 / std::sqrt(static_cast<double>(dh)));
    if (causal_bias.defined()) scores = nc::add(scores, causal_bias);
    head_outs.push_back(nc::matmul(nc::softmax(scores), vh));
  }
  Var attn = nc::add_rowvec(
      nc::matmul(nc::concat_cols(head_outs), pget(p, layer, "attn.wo", no_grad)),
      pget(p, layer, "attn.bo", no_grad));
  Var x1 = nc::layer_norm(nc::add(x, attn), pget(p, layer, "ln1.gain", no_grad),
                          pget(p, layer, "ln1.bias", no_grad));
  Var hidden = nc::gelu(nc::add_rowvec(
      nc::matmul(x1, pget(p, layer, "ffn.w1", no_grad)),
      pget(p, layer, "ffn.b1", no_grad)));
  Var ff = nc::add_rowvec(nc::matmul(hidden, pget(p, layer, "ffn.w2", no_grad)),
                          pget(p, layer, "ffn.b2", no_grad));
  return nc::layer_norm(nc::add(x1, ff), pget(p, layer, "ln2.gain", no_grad),
                        pget(p, layer, "ln2.bias", no_grad));
}

ActivationTrace forward(const std::vector<int64_t>& tokens, const EncoderParams& p,
                        AttentionMode mode, int detach_k) {
  ActivationTrace trace;
  trace.h.reserve(static_cast<size_t>(p.config.num_layers) + 1);
  Var h = embed(tokens, p);
  if (detach_k >= 0) h = h.detach();
  trace.h.push_back(h);
  for (int l = 1; l <= p.config.num_layers; ++l) {
    h = layer_forward(h, p, l, mode, /*no_grad=*/l <= detach_k);
    trace.h.push_back(h);
  }
  return trace;
}

ActivationTrace forward(const std::vector<int64_t>& tokens, const EncoderParams& p) {
  return forward(tokens, p, p.config.attention_mode);
}

Var lm_logits(const Var& h, const EncoderParams& p) {
  return nc::matmul(h, nc::transpose(p.set.at("g0.tok_embed").var));
}

std::optional<MlmLoss> masked_lm_loss(const std::vector<std::vector<int64_t>>& batch,
                                      const EncoderParams& p, double mask_prob,
                                      int64_t mask_id, nc::Rng& rng,
                                      int detach_k) {
  if (mask_prob <= 0.0) return std::nullopt;
  std::vector<Var> rows;
  std::vector<int64_t> targets;
  for (const auto& seq : batch) {
    std::vector<int64_t> masked_seq = seq;
    std::vector<size_t> masked_pos;
    for (size_t i = 0; i < seq.size(); ++i) {
      if (rng.uniform() < mask_prob) {
        masked_pos.push_back(i);
        masked_seq[i] = mask_id;
      }
    }
    if (masked_pos.empty()) continue;
    ActivationTrace t = forward(masked_seq, p, p.config.attention_mode, detach_k);
    const Var& top = t.h.back();
    for (size_t i : masked_pos) {
      rows.push_back(nc::row(top, static_cast<int64_t>(i)));
      targets.push_back(seq[i]);
    }
  }
  if (rows.empty()) return std::nullopt;
  Var logits = lm_logits(nc::stack_rows(rows), p);
  MlmLoss out{nc::cross_entropy(logits, targets), static_cast<int>(targets.size())};
  return out;
}

}  // namespace codescope::model
