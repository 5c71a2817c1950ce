#include "exset/autodiff/tensor.hpp"

#include <string>
#include <unordered_set>

#include "exset/error.hpp"

namespace exset::ad {

namespace {

std::shared_ptr<Node> new_node(Shape shape, std::shared_ptr<const std::vector<double>> values,
                               bool requires_grad) {
  if (numel(shape) != values->size())
    fail_contract("tensor: value count " + std::to_string(values->size()) +
                  " does not match shape size " + std::to_string(numel(shape)));
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(values);
  n->requires_grad = requires_grad;
  return n;
}

// Nodes reachable from root that take gradients, inputs before consumers.
std::vector<Node*> topo_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  seen.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* in = node->inputs[next++].get();
      if (in->requires_grad && seen.insert(in).second) stack.emplace_back(in, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

Tensor Tensor::constant(Shape shape, std::vector<double> values) {
  return constant(std::move(shape), std::make_shared<const std::vector<double>>(std::move(values)));
}

Tensor Tensor::constant(Shape shape, std::shared_ptr<const std::vector<double>> values) {
  return Tensor(new_node(std::move(shape), std::move(values), false));
}

Tensor Tensor::leaf(Shape shape, std::vector<double> values, bool requires_grad) {
  return leaf(std::move(shape), std::make_shared<const std::vector<double>>(std::move(values)),
              requires_grad);
}

Tensor Tensor::leaf(Shape shape, std::shared_ptr<const std::vector<double>> values,
                    bool requires_grad) {
  return Tensor(new_node(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return leaf(Shape{1}, std::vector<double>{v}, requires_grad);
}

Tensor Tensor::zeros(Shape shape) { return filled(std::move(shape), 0.0); }

Tensor Tensor::filled(Shape shape, double v) {
  const std::size_t n = numel(shape);
  return constant(std::move(shape), std::vector<double>(n, v));
}

double Tensor::item() const {
  if (size() != 1) fail_contract("tensor: item() on a tensor with " + std::to_string(size()) + " elements");
  return (*node_->value)[0];
}

std::vector<double> Tensor::grad() const {
  if (node_->grad.size() == size()) return node_->grad;
  return std::vector<double>(size(), 0.0);
}

Tensor Tensor::detach() const { return constant(node_->shape, node_->value); }

void backward(const Tensor& loss) {
  if (loss.size() != 1)
    fail_contract("backward: loss must be scalar, got " + std::to_string(loss.size()) + " elements");
  const double one = 1.0;
  backward(loss, std::span<const double>(&one, 1));
}

void backward(const Tensor& output, std::span<const double> seed) {
  if (seed.size() != output.size()) fail_contract("backward: seed size does not match output");
  Node* root = output.node().get();
  if (!root->requires_grad) return;
  const auto order = topo_order(root);
  for (Node* n : order) n->grad.assign(n->value->size(), 0.0);
  root->grad.assign(seed.begin(), seed.end());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->propagate) n->propagate(*n);
  }
}

namespace detail {

Tensor make_result(Shape shape, std::vector<double> value, std::vector<Tensor> inputs,
                   std::function<void(const Node&)> propagate) {
  bool any = false;
  for (const auto& t : inputs) any = any || t.requires_grad();
  auto n = new_node(std::move(shape), std::make_shared<const std::vector<double>>(std::move(value)), any);
  if (any) {
    n->inputs.reserve(inputs.size());
    for (auto& t : inputs) n->inputs.push_back(t.node());
    n->propagate = std::move(propagate);
  }
  return Tensor(std::move(n));
}

}  // namespace detail

}  // namespace exset::ad
