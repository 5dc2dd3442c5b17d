#pragma once

#include <optional>
#include <vector>

#include "codescope/model/params.hpp"
#include "codescope/numcore/ops.hpp"

namespace codescope::model {

/// Layer-wise contextual representations: h[0] is the (layer-normed)
/// embedding output, h[l] the output of encoder layer l; length L+1.
struct ActivationTrace {
  std::vector<nc::Var> h;
};

/// Token + positional embedding followed by the embedding layer-norm.
/// Empty input yields a 0 x d matrix.
nc::Var embed(const std::vector<int64_t>& tokens, const EncoderParams& p);

/// One encoder layer (multi-head self-attention and feed-forward, each with
/// residual + post-layer-norm). `no_grad` detaches the layer's parameters
/// and input so no gradient work is spent on it.
nc::Var layer_forward(const nc::Var& x, const EncoderParams& p, int layer,
                      AttentionMode mode, bool no_grad = false);

/// Full forward pass returning all L+1 layer outputs. When detach_k >= 0,
/// groups 0..detach_k run gradient-free (the frozen prefix under layer
/// freezing); the trace values are identical either way.
ActivationTrace forward(const std::vector<int64_t>& tokens, const EncoderParams& p,
                        AttentionMode mode, int detach_k = -1);

ActivationTrace forward(const std::vector<int64_t>& tokens, const EncoderParams& p);

/// Tied lm head: logits = h W_embed^T, shape [n x V].
nc::Var lm_logits(const nc::Var& h, const EncoderParams& p);

struct MlmLoss {
  nc::Var loss;
  int masked = 0;
};

/// Masks ~mask_prob of the positions with mask_id and scores cross-entropy
/// only at those positions. Returns nullopt when nothing was masked (skip
/// the batch) or mask_prob <= 0.
std::optional<MlmLoss> masked_lm_loss(const std::vector<std::vector<int64_t>>& batch,
                                      const EncoderParams& p, double mask_prob,
                                      int64_t mask_id, nc::Rng& rng,
                                      int detach_k = -1);

}  // namespace codescope::model
