#pragma once

#include <string>
#include <vector>

#include "codescope/model/params.hpp"

namespace codescope::telly {

/// Freezing the bottom of the network: group 0 (embeddings) through group K.
struct FreezePlan {
  int k = 0;
  std::vector<std::string> frozen_names;
  int64_t frozen_count = 0;
  int64_t trainable_count = 0;  // encoder side only, excludes task heads
};

FreezePlan make_freeze_plan(const model::ModelConfig& config, int k);

/// Sets trainable=false on groups 0..K and true on K+1..L plus any
/// non-group parameters (task heads). Idempotent.
void apply_freeze(model::EncoderParams& params, int k);

/// Checksum over the frozen groups, for before/after drift detection.
uint64_t frozen_checksum(const model::EncoderParams& params, int k);

}  // namespace codescope::telly
