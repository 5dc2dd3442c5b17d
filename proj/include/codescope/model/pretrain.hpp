#pragma once

#include <functional>
#include <vector>

#include "codescope/model/encoder.hpp"
#include "codescope/numcore/optim.hpp"

namespace codescope::model {

struct PretrainConfig {
  double lr = 1e-4;
  int batch_size = 32;
  int steps = 300;
  double mask_prob = 0.15;
  int64_t mask_id = 4;
  uint64_t seed = 0;
};

struct PretrainResult {
  std::vector<double> loss_curve;  // one entry per optimizer step
  int skipped_batches = 0;
};

/// Masked-LM training over encoded sequences; shuffles the corpus each pass
/// and runs for a fixed number of optimizer steps.
PretrainResult pretrain_mlm(EncoderParams& params,
                            const std::vector<std::vector<int64_t>>& sequences,
                            const PretrainConfig& cfg,
                            const std::function<void(int, double)>& on_step = {});

struct AlignConfig {
  double lr = 1e-4;
  int batch_size = 16;
  int steps = 300;
  double tau = 0.05;
  uint64_t seed = 0;
};

/// Bimodal alignment stage: InfoNCE over in-batch negatives on mean-pooled
/// top-layer representations of (docstring, code) sequence pairs. Teaches
/// every layer of the encoder to place the two modalities in one space.
PretrainResult pretrain_align(
    EncoderParams& params,
    const std::vector<std::pair<std::vector<int64_t>, std::vector<int64_t>>>&
        pairs,
    const AlignConfig& cfg,
    const std::function<void(int, double)>& on_step = {});

}  // namespace codescope::model
