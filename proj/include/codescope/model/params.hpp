#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "codescope/numcore/optim.hpp"
#include "codescope/numcore/rng.hpp"

namespace codescope::model {

enum class AttentionMode { Bidirectional, Causal };

struct ModelConfig {
  int64_t num_layers = 4;
  int64_t hidden_dim = 64;
  int64_t ffn_dim = 256;
  int64_t num_heads = 4;
  int64_t vocab_size = 0;
  int64_t max_positions = 128;
  AttentionMode attention_mode = AttentionMode::Bidirectional;

  void validate() const;  // throws std::invalid_argument

  /// Default desk-scale configuration.
  static ModelConfig desk(int64_t vocab_size);
  /// Full-scale configuration, for parameter accounting only.
  static ModelConfig full_scale(int64_t vocab_size = 50000);

  bool operator==(const ModelConfig&) const = default;
};

/// Parameters are grouped g0..gL: group 0 holds the embedding tables and the
/// embedding layer-norm; group l >= 1 holds encoder layer l. The lm_head is
/// tied to the token embedding table (so it lives in group 0).
struct EncoderParams {
  ModelConfig config;
  nc::ParamSet set;
  bool tied_lm_head = true;
};

/// Truncated-normal(0.02) weights, zero biases, layer-norm gain 1 / bias 0.
EncoderParams init_params(const ModelConfig& config, nc::Rng& rng);

/// Deep copy: fresh leaf variables with identical values and flags.
EncoderParams clone_params(const EncoderParams& src);

/// Group index from a parameter name ("g3.attn.wq" -> 3); -1 if unprefixed.
int group_of(const std::string& param_name);

/// All parameter names in group g, in declaration order.
std::vector<std::string> group_names(const ModelConfig& config, int group);

struct ParamCounts {
  int64_t total = 0;
  int64_t trainable = 0;
  int64_t frozen = 0;
  std::vector<int64_t> per_group;  // size L+1
};

/// Closed-form per-encoder-layer parameter count:
/// 4(d^2+d) + (d*f+f) + (f*d+d) + 4d.
int64_t per_layer_param_count(const ModelConfig& config);

/// Closed-form accounting. freeze_k freezes groups 0..K (K in [0, L]).
ParamCounts param_count(const ModelConfig& config,
                        std::optional<int> freeze_k = std::nullopt);

}  // namespace codescope::model
