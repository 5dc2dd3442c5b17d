#pragma once

#include <map>
#include <string>
#include <vector>

#include "codescope/numcore/autograd.hpp"

namespace codescope::nc {

/// Named model parameter. `trainable == false` guarantees the value is
/// bit-identical before and after any optimizer step.
struct Parameter {
  std::string name;
  Var var;
  bool trainable = true;
};

/// Ordered collection of uniquely named parameters.
class ParamSet {
 public:
  Var add(const std::string& name, Tensor value, bool trainable = true);
  void add_existing(const std::string& name, Var var, bool trainable = true);

  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::vector<Parameter>& all() { return params_; }
  const std::vector<Parameter>& all() const { return params_; }
  size_t size() const { return params_.size(); }

  void zero_grads();
  int64_t total_elements() const;
  int64_t trainable_elements() const;

  /// FNV-1a hash of the raw bytes of the named parameters, for
  /// frozen-immutability checks.
  uint64_t checksum(const std::vector<std::string>& names) const;
  uint64_t checksum_all() const;

 private:
  std::vector<Parameter> params_;
  std::map<std::string, size_t> index_;
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Standard Adam with bias correction. State is created lazily per trainable
/// parameter; non-trainable parameters are never touched.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  void step(ParamSet& params);
  const AdamConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }

 private:
  struct State {
    Tensor m, v;
    int64_t t = 0;
  };
  AdamConfig cfg_;
  std::map<std::string, State> state_;
};

}  // namespace codescope::nc
