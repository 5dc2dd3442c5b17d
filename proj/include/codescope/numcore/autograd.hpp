#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "codescope/numcore/tensor.hpp"

namespace codescope::nc {

struct Node;

/// Handle to a value in the computation graph. Copying a Var shares the node.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> n) : n_(std::move(n)) {}

  /// Leaf holding a constant (no gradient flows into it).
  static Var constant(Tensor value);
  /// Leaf that accumulates gradient (parameters).
  static Var leaf(Tensor value);

  bool defined() const { return n_ != nullptr; }
  const Tensor& value() const;
  Tensor& mutable_value();
  const Tensor& grad() const;
  bool requires_grad() const;
  bool has_grad() const;
  void zero_grad();
  std::shared_ptr<Node> node() const { return n_; }

  /// Value without graph tracking; gradients stop here.
  Var detach() const;

  double item() const;

 private:
  std::shared_ptr<Node> n_;
};

struct Node {
  Tensor value;
  Tensor grad;  // allocated on first accumulation
  bool requires_grad = false;
  bool grad_allocated = false;
  std::string op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  // Called with this node's grad fully accumulated; pushes into parents.
  std::function<void(Node&)> backward_fn;

  void accumulate(const Tensor& g);
};

/// Reverse-mode backprop from a scalar root. Seeds d(root)/d(root) = 1 and
/// accumulates into every reachable leaf with requires_grad.
void backward(const Var& root);

/// Builds an op node: applies precision quantization and finiteness checks
/// to the produced value.
Var make_op(Tensor value, const char* op, std::vector<Var> parents,
            std::function<void(Node&)> backward_fn);

}  // namespace codescope::nc
