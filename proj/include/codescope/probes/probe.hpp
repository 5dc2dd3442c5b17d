#pragma once

#include <string>
#include <vector>

#include "codescope/model/encoder.hpp"
#include "codescope/probes/datasets.hpp"
#include "codescope/probes/metrics.hpp"

namespace codescope::probes {

struct ProbeConfig {
  double lr = 1e-4;
  int batch_size = 32;
  int max_epochs = 30;
  int patience = 5;
  double contrastive_tau = 0.05;
  std::vector<uint64_t> seeds = {0, 1, 2};
};

struct ProbeReport {
  std::string task;
  std::string source;  // random | pretrained | finetuned
  double metric = 0.0;  // accuracy or MAP, in [0,1]
  std::vector<double> per_seed_metric;
  std::vector<double> lambda;  // seed-averaged softmax mixing weights, L+1
  std::vector<int> argmax_layer_per_seed;
  std::vector<uint64_t> seeds;
  uint64_t model_checksum = 0;  // verified unchanged by training
};

/// Trains the layer mixer + task head over frozen representations of `m`.
/// Model parameters are read once into constant features; a post-run
/// checksum guards the frozen-feature contract.
ProbeReport train_probe(const model::EncoderParams& m, const ProbeDataset& ds,
                        const ProbeConfig& cfg, const std::string& source);

/// Softmax weights for zero logits: uniform 1/(L+1).
std::vector<double> uniform_lambda(int num_layers);

std::string report_json(const ProbeReport& r, const std::string& config_hash);

}  // namespace codescope::probes
