#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "exset/grid.hpp"

namespace exset::ad {

/// A node of the define-by-run graph. Values are immutable once created; grads are
/// (re)assigned by backward().
struct Node {
  Shape shape;
  std::shared_ptr<const std::vector<double>> value;
  std::vector<double> grad;  // empty until a backward pass reaches the node
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  // Propagates this node's grad into its inputs' grads (accumulating).
  std::function<void(const Node&)> propagate;
};

/// Handle to a graph node. Copies share the node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor constant(Shape shape, std::vector<double> values);
  static Tensor constant(Shape shape, std::shared_ptr<const std::vector<double>> values);
  static Tensor leaf(Shape shape, std::vector<double> values, bool requires_grad = true);
  static Tensor leaf(Shape shape, std::shared_ptr<const std::vector<double>> values,
                     bool requires_grad = true);
  static Tensor scalar(double v, bool requires_grad = false);
  static Tensor zeros(Shape shape);
  static Tensor filled(Shape shape, double v);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t size() const { return node_->value->size(); }
  std::size_t rank() const { return node_->shape.size(); }
  std::span<const double> values() const { return *node_->value; }
  const std::shared_ptr<const std::vector<double>>& storage() const { return node_->value; }
  double operator[](std::size_t i) const { return (*node_->value)[i]; }
  /// Value of a one-element tensor.
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  /// Gradient from the last backward pass; zeros if the node was not reached.
  std::vector<double> grad() const;

  /// Same values, cut from the graph (shares storage).
  Tensor detach() const;

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

/// Reverse pass from a scalar loss. Every requires_grad node reachable from the
/// loss gets its grad assigned (previous grads are discarded).
void backward(const Tensor& loss);

/// Reverse pass seeded with an explicit output gradient of the output's shape.
void backward(const Tensor& output, std::span<const double> seed);

namespace detail {

/// Creates an op result. If no input requires grad the result is a constant and the
/// propagate function is dropped (together with the references to the inputs).
Tensor make_result(Shape shape, std::vector<double> value, std::vector<Tensor> inputs,
                   std::function<void(const Node&)> propagate);

/// Grad buffer of an input inside a propagate function; null if the input does not
/// take gradients.
inline double* grad_of(const std::shared_ptr<Node>& n) {
  return n->requires_grad ? n->grad.data() : nullptr;
}

}  // namespace detail

}  // namespace exset::ad
