#include "codescope/numcore/optim.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace codescope::nc {

Var ParamSet::add(const std::string& name, Tensor value, bool trainable) {
  Var v = Var::leaf(std::move(value));
  add_existing(name, v, trainable);
  return v;
}

void ParamSet::add_existing(const std::string& name, Var var, bool trainable) {
  if (index_.count(name))
    throw std::invalid_argument("duplicate parameter name: " + name);
  index_[name] = params_.size();
  params_.push_back(Parameter{name, std::move(var), trainable});
}

Parameter& ParamSet::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named " + name);
  return params_[it->second];
}

const Parameter& ParamSet::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named " + name);
  return params_[it->second];
}

bool ParamSet::contains(const std::string& name) const {
  return index_.count(name) > 0;
}

void ParamSet::zero_grads() {
  for (auto& p : params_) p.var.zero_grad();
}

int64_t ParamSet::total_elements() const {
  int64_t n = 0;
  for (const auto& p : params_) n += p.var.value().numel();
  return n;
}

int64_t ParamSet::trainable_elements() const {
  int64_t n = 0;
  for (const auto& p : params_)
    if (p.trainable) n += p.var.value().numel();
  return n;
}

uint64_t ParamSet::checksum(const std::vector<std::string>& names) const {
  uint64_t h = 14695981039346656037ull;
  auto mix = [&h](const void* bytes, size_t len) {
    const unsigned char* b = static_cast<const unsigned char*>(bytes);
    for (size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& name : names) {
    const Parameter& p = at(name);
    mix(name.data(), name.size());
    mix(p.var.value().data(),
        static_cast<size_t>(p.var.value().numel()) * sizeof(double));
  }
  return h;
}

uint64_t ParamSet::checksum_all() const {
  std::vector<std::string> names;
  for (const auto& p : params_) names.push_back(p.name);
  return checksum(names);
}

void Adam::step(ParamSet& params) {
  for (auto& p : params.all()) {
    if (!p.trainable) continue;
    if (!p.var.has_grad()) continue;  // parameter unused in this graph
    Tensor& w = p.var.mutable_value();
    const Tensor& g = p.var.grad();
    auto [it, inserted] = state_.try_emplace(p.name);
    State& s = it->second;
    if (inserted) {
      s.m = Tensor::zeros(w.shape());
      s.v = Tensor::zeros(w.shape());
    }
    if (!s.m.same_shape(w))
      throw NumericError("Adam state shape mismatch for " + p.name);
    s.t += 1;
    double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(s.t));
    double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(s.t));
    for (int64_t i = 0; i < w.numel(); ++i) {
      double gi = g[i];
      s.m[i] = cfg_.beta1 * s.m[i] + (1.0 - cfg_.beta1) * gi;
      s.v[i] = cfg_.beta2 * s.v[i] + (1.0 - cfg_.beta2) * gi * gi;
      double mhat = s.m[i] / bc1;
      double vhat = s.v[i] / bc2;
      w[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    w.quantize();
    check_finite(w, "adam_step");
  }
}

}  // namespace codescope::nc
