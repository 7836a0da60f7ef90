// SPDX-License-Identifier: Apache-2.0

#ifndef MOLT_AD_TENSOR_HPP_
#define MOLT_AD_TENSOR_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace molt::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& s);
std::string shape_str(const Shape& s);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated lazily, same length as value
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;  // pushes node.grad into parents
  // Stashed activations for the backward pass.
  std::vector<double> saved0, saved1;

  void ensure_grad();
};

}  // namespace detail

// Dense row-major 64-bit tensor with reverse-mode autodiff. Copies are
// shallow: they alias the same node, like the usual dynamic-graph handles.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double v, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t size() const;
  std::size_t rank() const { return shape().size(); }

  std::span<const double> values() const;
  std::span<double> values_mut();  // leaf mutation (optimizer updates)
  double item() const;             // value of a 1-element tensor

  bool requires_grad() const;
  bool has_grad() const;
  std::span<const double> grad() const;
  void zero_grad();

  std::shared_ptr<detail::Node> node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node)
      : node_(std::move(node)) {}
  friend Tensor wrap_node_(std::shared_ptr<detail::Node>);

  std::shared_ptr<detail::Node> node_;
};

// Elementwise with numpy-style trailing-aligned broadcasting.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);

Tensor matmul(const Tensor& a, const Tensor& b);  // (M,K) x (K,N)
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

Tensor sum(const Tensor& a, std::size_t axis);
Tensor mean(const Tensor& a, std::size_t axis);
Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
// Columns [start, start+len) of the last axis.
Tensor slice_last(const Tensor& a, std::size_t start, std::size_t len);
Tensor reshape(const Tensor& a, Shape shape);

// Row selection / accumulation along axis 0.
Tensor gather_rows(const Tensor& a, std::vector<std::size_t> indices);
Tensor scatter_add_rows(const Tensor& a, std::vector<std::size_t> indices,
                        std::size_t out_rows);

// sqrt(sum(x^2, axis) + eps); eps keeps the gradient finite at zero input.
Tensor l2_norm(const Tensor& a, std::size_t axis, double eps = 1e-12);
// sum(a * b, axis) for same-shape operands.
Tensor dot(const Tensor& a, const Tensor& b, std::size_t axis);

Tensor sigmoid(const Tensor& a);
Tensor swish(const Tensor& a);  // x * sigmoid(x)

// Train mode zeroes entries with probability p and scales survivors by
// 1/(1-p); the mask is a pure function of (key, element index). Eval mode
// is the identity.
Tensor dropout(const Tensor& a, double p, bool train, std::uint64_t key);

// Per-feature normalization of a (batch, features) input. Train mode uses
// batch statistics (biased variance) and updates the running buffers with
// momentum; eval mode uses the running statistics.
Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  std::vector<double>& running_mean,
                  std::vector<double>& running_var, bool train,
                  double momentum = 0.1, double eps = 1e-5);

// Reverse-mode sweep from a scalar loss; gradients accumulate additively
// across repeated calls until zero_grad.
void backward(const Tensor& loss);

}  // namespace molt::ad

#endif  // MOLT_AD_TENSOR_HPP_
