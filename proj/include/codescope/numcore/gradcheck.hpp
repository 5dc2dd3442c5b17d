#pragma once

#include <functional>

#include "codescope/numcore/optim.hpp"
#include "codescope/numcore/rng.hpp"

namespace codescope::nc {

struct GradCheckOptions {
  double step = 1e-4;
  int max_coords_per_param = 100;  // sampled when a parameter is larger
  uint64_t sample_seed = 0;
};

/// Compares reverse-mode gradients of a scalar loss against central finite
/// differences. `make_loss` must rebuild the loss graph from the current
/// parameter values on every call. Runs in 64-bit precision regardless of the
/// global mode and restores it afterwards. Returns the max relative error
/// over all checked coordinates.
double grad_check(const std::function<Var()>& make_loss,
                  ParamSet& params,
                  const GradCheckOptions& opts = {});

}  // namespace codescope::nc
