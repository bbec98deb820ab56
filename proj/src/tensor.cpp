#include "polygen/tensor/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace polygen {

std::string Shape::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
         std::to_string(h) + "," + std::to_string(w) + ")";
}

static void check_shape(const Shape& s) {
  if (s.n < 0 || s.c < 0 || s.h < 0 || s.w < 0)
    throw std::invalid_argument("tensor: negative extent in shape " + s.str());
}

Tensor Tensor::zeros(Shape s, bool requires_grad) {
  return full(s, 0.0f, requires_grad);
}

Tensor Tensor::full(Shape s, float v, bool requires_grad) {
  check_shape(s);
  auto node = std::make_shared<TensorNode>();
  node->shape = s;
  node->value.assign(static_cast<std::size_t>(s.numel()), v);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::from_data(Shape s, std::vector<float> data, bool requires_grad) {
  check_shape(s);
  if (static_cast<std::int64_t>(data.size()) != s.numel())
    throw std::invalid_argument("tensor: data length " +
                                std::to_string(data.size()) +
                                " does not match shape " + s.str());
  auto node = std::make_shared<TensorNode>();
  node->shape = s;
  node->value = std::move(data);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

float Tensor::item() const {
  if (numel() != 1)
    throw std::invalid_argument("tensor: item() on non-scalar shape " +
                                shape().str());
  return node_->value[0];
}

Tensor Tensor::detach() const {
  auto node = std::make_shared<TensorNode>();
  node->shape = node_->shape;
  node->value = node_->value;
  node->requires_grad = false;
  return Tensor(std::move(node));
}

void backward(const Tensor& loss) {
  if (!loss.defined())
    throw std::invalid_argument("backward: undefined tensor");
  if (loss.numel() != 1)
    throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                loss.shape().str());

  // Iterative post-order DFS over parents.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> visited;
  struct Frame {
    TensorNode* node;
    std::size_t next_parent;
  };
  std::vector<Frame> stack;
  TensorNode* root = loss.node().get();
  if (visited.insert(root).second) stack.push_back({root, 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.node->parents.size()) {
      TensorNode* p = f.node->parents[f.next_parent++].get();
      if (visited.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }

  // Interior grads are scratch for this sweep; only leaves accumulate
  // across repeated backward calls.
  for (TensorNode* node : order)
    if (node->backward_fn) node->grad.assign(node->value.size(), 0.0f);

  root->ensure_grad();
  root->grad[0] += 1.0f;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* node = *it;
    if (!node->backward_fn) continue;
    for (auto& p : node->parents)
      if (p->requires_grad) p->ensure_grad();
    node->backward_fn(*node);
  }
}

bool all_finite(const std::vector<float>& v) {
  for (float x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace polygen
