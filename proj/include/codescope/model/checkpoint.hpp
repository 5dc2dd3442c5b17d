#pragma once

#include <stdexcept>
#include <string>

#include "codescope/model/params.hpp"

namespace codescope::model {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File layout: 8-byte ASCII magic "CSCKPT1\n", uint64 little-endian header
/// length, JSON header (ckpt_version, config, precision, tied_lm_head,
/// parameter names/shapes/offsets), then the raw little-endian float64
/// payload. Round trip is bit-exact.
void save_checkpoint(const EncoderParams& params, const std::string& path);

EncoderParams load_checkpoint(const std::string& path);

/// Loads and verifies the stored config matches `expect`.
EncoderParams load_checkpoint(const std::string& path, const ModelConfig& expect);

}  // namespace codescope::model
