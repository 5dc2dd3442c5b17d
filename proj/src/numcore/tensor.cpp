#include "codescope/numcore/tensor.hpp"

#include <cmath>
#include <sstream>

namespace codescope::nc {

namespace {
Precision g_precision = Precision::f32;

size_t shape_numel(const std::vector<int64_t>& shape) {
  size_t n = 1;
  for (int64_t d : shape) {
    if (d < 0) throw DimensionError("negative extent in shape");
    n *= static_cast<size_t>(d);
  }
  return n;
}
}  // namespace

Precision precision() { return g_precision; }
void set_precision(Precision p) { g_precision = p; }

Tensor::Tensor(std::vector<int64_t> shape)
    : shape_(std::move(shape)), data_(shape_numel(shape_), 0.0) {}

Tensor::Tensor(std::vector<int64_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_numel(shape_) != data_.size())
    throw DimensionError("data length does not match shape " + shape_str());
}

Tensor Tensor::zeros(std::vector<int64_t> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<int64_t> shape, double v) {
  Tensor t(std::move(shape));
  for (auto& x : t.data_) x = v;
  return t;
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

void Tensor::check_rank2(const char* what) const {
  if (rank() != 2)
    throw DimensionError(std::string(what) + " on tensor of shape " + shape_str());
}

bool Tensor::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

void Tensor::quantize() {
  if (g_precision == Precision::f32) {
    for (auto& x : data_) x = static_cast<double>(static_cast<float>(x));
  }
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape_.size(); ++i) os << (i ? "," : "") << shape_[i];
  os << "]";
  return os.str();
}

void check_finite(const Tensor& t, const char* op) {
  if (!t.all_finite())
    throw NumericError(std::string("non-finite value produced by op '") + op + "'");
}

}  // namespace codescope::nc
