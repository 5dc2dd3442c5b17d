#include "codescope/numcore/gradcheck.hpp"

#include <cmath>

namespace codescope::nc {

double grad_check(const std::function<Var()>& make_loss, ParamSet& params,
                  const GradCheckOptions& opts) {
  Precision saved = precision();
  set_precision(Precision::f64);
  double max_rel = 0.0;
  try {
    params.zero_grads();
    Var loss = make_loss();
    backward(loss);

    Rng rng(opts.sample_seed);
    for (auto& p : params.all()) {
      if (!p.trainable) continue;
      Tensor& w = p.var.mutable_value();
      int64_t n = w.numel();
      std::vector<int64_t> coords;
      if (n <= opts.max_coords_per_param) {
        for (int64_t i = 0; i < n; ++i) coords.push_back(i);
      } else {
        coords = rng.sample_without_replacement(n, opts.max_coords_per_param);
      }
      for (int64_t i : coords) {
        double analytic = p.var.has_grad() ? p.var.grad()[i] : 0.0;
        double orig = w[i];
        w[i] = orig + opts.step;
        double fp = make_loss().item();
        w[i] = orig - opts.step;
        double fm = make_loss().item();
        w[i] = orig;
        double numeric = (fp - fm) / (2.0 * opts.step);
        double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1.0});
        double rel = std::fabs(analytic - numeric) / denom;
        max_rel = std::max(max_rel, rel);
      }
    }
  } catch (...) {
    set_precision(saved);
    throw;
  }
  set_precision(saved);
  return max_rel;
}

}  // namespace codescope::nc
