#include "codescope/numcore/autograd.hpp"

#include <unordered_set>

namespace codescope::nc {

Var Var::constant(Tensor value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = false;
  n->op = "const";
  return Var(n);
}

Var Var::leaf(Tensor value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = true;
  n->op = "leaf";
  return Var(n);
}

const Tensor& Var::value() const { return n_->value; }
Tensor& Var::mutable_value() { return n_->value; }

const Tensor& Var::grad() const {
  if (!n_->grad_allocated)
    throw NumericError("gradient requested before backward (op '" + n_->op + "')");
  return n_->grad;
}

bool Var::requires_grad() const { return n_ && n_->requires_grad; }
bool Var::has_grad() const { return n_ && n_->grad_allocated; }

void Var::zero_grad() {
  if (n_ && n_->grad_allocated) {
    for (auto& x : n_->grad.vec()) x = 0.0;
  }
}

Var Var::detach() const { return Var::constant(n_->value); }

double Var::item() const {
  if (n_->value.numel() != 1)
    throw DimensionError("item() on non-scalar tensor " + n_->value.shape_str());
  return n_->value[0];
}

void Node::accumulate(const Tensor& g) {
  if (!grad_allocated) {
    grad = Tensor::zeros(value.shape());
    grad_allocated = true;
  }
  if (!grad.same_shape(g))
    throw DimensionError("gradient shape mismatch for op '" + op + "'");
  for (int64_t i = 0; i < g.numel(); ++i) grad[i] += g[i];
}

namespace {
void topo_visit(const std::shared_ptr<Node>& n,
                std::unordered_set<Node*>& seen,
                std::vector<std::shared_ptr<Node>>& order) {
  if (seen.count(n.get())) return;
  seen.insert(n.get());
  for (const auto& p : n->parents) topo_visit(p, seen, order);
  order.push_back(n);
}
}  // namespace

void backward(const Var& root) {
  if (root.value().numel() != 1)
    throw DimensionError("backward() requires a scalar root");
  std::unordered_set<Node*> seen;
  std::vector<std::shared_ptr<Node>> order;
  topo_visit(root.node(), seen, order);

  root.node()->accumulate(Tensor::full(root.value().shape(), 1.0));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node& n = **it;
    if (n.backward_fn && n.grad_allocated) {
      check_finite(n.grad, n.op.c_str());
      n.backward_fn(n);
    }
  }
}

Var make_op(Tensor value, const char* op, std::vector<Var> parents,
            std::function<void(Node&)> backward_fn) {
  value.quantize();
  check_finite(value, op);
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->op = op;
  bool needs = false;
  for (const auto& p : parents) {
    needs = needs || p.requires_grad();
    n->parents.push_back(p.node());
  }
  n->requires_grad = needs;
  if (needs) n->backward_fn = std::move(backward_fn);
  return Var(n);
}

}  // namespace codescope::nc
