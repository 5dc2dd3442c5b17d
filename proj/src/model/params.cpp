#include "codescope/model/params.hpp"

#include <stdexcept>

namespace codescope::model {

void ModelConfig::validate() const {
  if (num_layers <= 0) throw std::invalid_argument("num_layers must be positive");
  if (hidden_dim <= 0) throw std::invalid_argument("hidden_dim must be positive");
  if (ffn_dim <= 0) throw std::invalid_argument("ffn_dim must be positive");
  if (num_heads <= 0 || hidden_dim % num_heads != 0)
    throw std::invalid_argument("num_heads must be positive and divide hidden_dim");
  if (vocab_size <= 0) throw std::invalid_argument("vocab_size must be positive");
  if (max_positions <= 0)
    throw std::invalid_argument("max_positions must be positive");
}

ModelConfig ModelConfig::desk(int64_t vocab_size) {
  ModelConfig c;
  c.vocab_size = vocab_size;
  return c;
}

ModelConfig ModelConfig::full_scale(int64_t vocab_size) {
  ModelConfig c;
  c.num_layers = 12;
  c.hidden_dim = 768;
  c.ffn_dim = 3072;
  c.num_heads = 12;
  c.vocab_size = vocab_size;
  c.max_positions = 512;
  return c;
}

namespace {

std::string gp(int g, const std::string& rest) {
  return "g" + std::to_string(g) + "." + rest;
}

nc::Tensor trunc_normal(std::vector<int64_t> shape, nc::Rng& rng) {
  nc::Tensor t = nc::Tensor::zeros(std::move(shape));
  for (auto& x : t.vec()) x = rng.truncated_normal(0.02);
  return t;
}

}  // namespace

EncoderParams init_params(const ModelConfig& config, nc::Rng& rng) {
  config.validate();
  const int64_t d = config.hidden_dim, f = config.ffn_dim;
  EncoderParams p;
  p.config = config;
  p.set.add(gp(0, "tok_embed"), trunc_normal({config.vocab_size, d}, rng));
  p.set.add(gp(0, "pos_embed"), trunc_normal({config.max_positions, d}, rng));
  p.set.add(gp(0, "ln.gain"), nc::Tensor::full({d}, 1.0));
  p.set.add(gp(0, "ln.bias"), nc::Tensor::zeros({d}));
  for (int l = 1; l <= config.num_layers; ++l) {
    for (const char* w : {"attn.wq", "attn.wk", "attn.wv", "attn.wo"}) {
      p.set.add(gp(l, w), trunc_normal({d, d}, rng));
    }
    for (const char* b : {"attn.bq", "attn.bk", "attn.bv", "attn.bo"}) {
      p.set.add(gp(l, b), nc::Tensor::zeros({d}));
    }
    p.set.add(gp(l, "ffn.w1"), trunc_normal({d, f}, rng));
    p.set.add(gp(l, "ffn.b1"), nc::Tensor::zeros({f}));
    p.set.add(gp(l, "ffn.w2"), trunc_normal({f, d}, rng));
    p.set.add(gp(l, "ffn.b2"), nc::Tensor::zeros({d}));
    p.set.add(gp(l, "ln1.gain"), nc::Tensor::full({d}, 1.0));
    p.set.add(gp(l, "ln1.bias"), nc::Tensor::zeros({d}));
    p.set.add(gp(l, "ln2.gain"), nc::Tensor::full({d}, 1.0));
    p.set.add(gp(l, "ln2.bias"), nc::Tensor::zeros({d}));
  }
  return p;
}

EncoderParams clone_params(const EncoderParams& src) {
  EncoderParams out;
  out.config = src.config;
  out.tied_lm_head = src.tied_lm_head;
  for (const auto& p : src.set.all()) out.set.add(p.name, p.var.value(), p.trainable);
  return out;
}

int group_of(const std::string& name) {
  if (name.size() < 3 || name[0] != 'g') return -1;
  size_t dot = name.find('.');
  if (dot == std::string::npos || dot == 1) return -1;
  int g = 0;
  for (size_t i = 1; i < dot; ++i) {
    if (name[i] < '0' || name[i] > '9') return -1;
    g = g * 10 + (name[i] - '0');
  }
  return g;
}

std::vector<std::string> group_names(const ModelConfig& config, int group) {
  std::vector<std::string> out;
  if (group == 0) {
    for (const char* n : {"tok_embed", "pos_embed", "ln.gain", "ln.bias"})
      out.push_back(gp(0, n));
  } else if (group >= 1 && group <= config.num_layers) {
    for (const char* n :
         {"attn.wq", "attn.wk", "attn.wv", "attn.wo", "attn.bq", "attn.bk",
          "attn.bv", "attn.bo", "ffn.w1", "ffn.b1", "ffn.w2", "ffn.b2",
          "ln1.gain", "ln1.bias", "ln2.gain", "ln2.bias"})
      out.push_back(gp(group, n));
  }
  return out;
}

int64_t per_layer_param_count(const ModelConfig& config) {
  const int64_t d = config.hidden_dim, f = config.ffn_dim;
  return 4 * (d * d + d) + (d * f + f) + (f * d + d) + 4 * d;
}

ParamCounts param_count(const ModelConfig& config, std::optional<int> freeze_k) {
  config.validate();
  if (freeze_k && (*freeze_k < 0 || *freeze_k > config.num_layers))
    throw std::invalid_argument("freeze_k out of range");
  const int64_t d = config.hidden_dim;
  ParamCounts c;
  c.per_group.resize(static_cast<size_t>(config.num_layers) + 1);
  c.per_group[0] = config.vocab_size * d + config.max_positions * d + 2 * d;
  for (int l = 1; l <= config.num_layers; ++l)
    c.per_group[static_cast<size_t>(l)] = per_layer_param_count(config);
  for (int64_t n : c.per_group) c.total += n;
  int frozen_upto = freeze_k ? *freeze_k : -1;
  for (int g = 0; g <= frozen_upto; ++g)
    c.frozen += c.per_group[static_cast<size_t>(g)];
  c.trainable = c.total - c.frozen;
  return c;
}

}  // namespace codescope::model
