#include "codescope/telly/freeze.hpp"

#include <stdexcept>

namespace codescope::telly {

FreezePlan make_freeze_plan(const model::ModelConfig& config, int k) {
  if (k < 0 || k > config.num_layers)
    throw std::invalid_argument("freeze K out of range [0, L]");
  FreezePlan plan;
  plan.k = k;
  for (int g = 0; g <= k; ++g)
    for (auto& n : model::group_names(config, g)) plan.frozen_names.push_back(n);
  auto counts = model::param_count(config, k);
  plan.frozen_count = counts.frozen;
  plan.trainable_count = counts.trainable;
  return plan;
}

void apply_freeze(model::EncoderParams& params, int k) {
  if (k < 0 || k > params.config.num_layers)
    throw std::invalid_argument("freeze K out of range [0, L]");
  for (auto& p : params.set.all()) {
    int g = model::group_of(p.name);
    // non-group parameters (task heads) always train
    p.trainable = !(g >= 0 && g <= k);
  }
}

uint64_t frozen_checksum(const model::EncoderParams& params, int k) {
  FreezePlan plan = make_freeze_plan(params.config, k);
  return params.set.checksum(plan.frozen_names);
}

}  // namespace codescope::telly
