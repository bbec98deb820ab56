#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace polygen {

// Dense rank-4 extent descriptor: (batch, channels, height, width).
struct Shape {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;

  std::int64_t numel() const {
    return static_cast<std::int64_t>(n) * c * h * w;
  }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

// One node of the reverse-mode tape. Interior nodes keep shared ownership of
// their parents, so a whole step's graph stays alive exactly as long as some
// tensor handle references it.
struct TensorNode {
  Shape shape;
  std::vector<float> value;
  std::vector<float> grad;  // allocated lazily, same extents as value
  bool requires_grad = false;
  std::string name;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backward_fn;

  void ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0f);
  }
};

// Value-semantic handle to a tape node. Copies share the node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}

  static Tensor zeros(Shape s, bool requires_grad = false);
  static Tensor full(Shape s, float v, bool requires_grad = false);
  static Tensor from_data(Shape s, std::vector<float> data,
                          bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::int64_t numel() const { return node_->shape.numel(); }
  bool requires_grad() const { return node_->requires_grad; }

  const std::vector<float>& values() const { return node_->value; }
  std::vector<float>& values() { return node_->value; }
  const std::vector<float>& grad() const { return node_->grad; }

  float at(int n, int c, int h, int w) const {
    const Shape& s = node_->shape;
    return node_->value[((static_cast<std::int64_t>(n) * s.c + c) * s.h + h) * s.w + w];
  }
  float& at(int n, int c, int h, int w) {
    const Shape& s = node_->shape;
    return node_->value[((static_cast<std::int64_t>(n) * s.c + c) * s.h + h) * s.w + w];
  }

  // Scalar convenience for (1,1,1,1) tensors.
  float item() const;

  void set_name(std::string name) { node_->name = std::move(name); }
  const std::string& name() const { return node_->name; }

  void zero_grad() { node_->grad.assign(node_->value.size(), 0.0f); }

  // Same values, fresh leaf, no tape history.
  Tensor detach() const;

  std::shared_ptr<TensorNode>& node() { return node_; }
  const std::shared_ptr<TensorNode>& node() const { return node_; }

 private:
  std::shared_ptr<TensorNode> node_;
};

// Reverse-mode sweep from a scalar loss. Gradients accumulate into every
// reachable node with requires_grad; repeated calls without zero_grad add up.
void backward(const Tensor& loss);

bool all_finite(const std::vector<float>& v);

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

}  // namespace polygen
