#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace codescope::nc {

/// Compute precision applied to every op result. f32 rounds each produced
/// value through single precision; f64 keeps full double precision and is
/// required for finite-difference gradient checking.
enum class Precision { f32, f64 };

Precision precision();
void set_precision(Precision p);

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense row-major tensor of doubles. Immutable by convention once produced
/// by an op; only optimizer steps mutate parameter tensors in place.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int64_t> shape);
  Tensor(std::vector<int64_t> shape, std::vector<double> data);

  static Tensor zeros(std::vector<int64_t> shape);
  static Tensor full(std::vector<int64_t> shape, double v);
  static Tensor scalar(double v);

  const std::vector<int64_t>& shape() const { return shape_; }
  int64_t dim(size_t i) const { return shape_.at(i); }
  size_t rank() const { return shape_.size(); }
  int64_t numel() const { return static_cast<int64_t>(data_.size()); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  double& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  // 2-D accessors; rows()/cols() throw DimensionError if rank != 2.
  int64_t rows() const {
    check_rank2("rows()");
    return shape_[0];
  }
  int64_t cols() const {
    check_rank2("cols()");
    return shape_[1];
  }
  double& at(int64_t r, int64_t c) {
    return data_[static_cast<size_t>(r * shape_[1] + c)];
  }
  double at(int64_t r, int64_t c) const {
    return data_[static_cast<size_t>(r * shape_[1] + c)];
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  bool all_finite() const;

  /// Rounds every element through float when the global precision is f32.
  void quantize();

  std::string shape_str() const;

 private:
  std::vector<int64_t> shape_;
  std::vector<double> data_;

  void check_rank2(const char* what) const;
};

/// Throws NumericError naming `op` if any element of `t` is NaN/Inf.
void check_finite(const Tensor& t, const char* op);

}  // namespace codescope::nc
