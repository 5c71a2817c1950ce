#pragma once

#include <cstdint>
#include <limits>

#include "exset/autodiff/tensor.hpp"

namespace exset::ad {

// Elementwise binary ops. Shapes must agree, or one operand has a single element
// (broadcast).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor neg(const Tensor& x);
Tensor scale(const Tensor& x, double c);
Tensor add_constant(const Tensor& x, double c);
Tensor square(const Tensor& x);
Tensor sqrt(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor softplus(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double alpha);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor dot(const Tensor& a, const Tensor& b);

/// x / ||x||_2
Tensor normalize_l2(const Tensor& x);

Tensor reshape(const Tensor& x, Shape shape);

inline constexpr std::size_t kZeroIndex = std::numeric_limits<std::size_t>::max();

/// out[i] = x[index[i]], or 0 where index[i] == kZeroIndex. Backward scatter-adds.
Tensor gather(const Tensor& x, std::shared_ptr<const std::vector<std::size_t>> index, Shape shape);

/// Flat slice [begin, begin + count) as a 1-D tensor.
Tensor slice(const Tensor& x, std::size_t begin, std::size_t count);
/// Concatenation of flattened tensors.
Tensor concat(const std::vector<Tensor>& parts);

/// Sub-block of a tensor of the same rank starting at `offset`.
Tensor crop(const Tensor& x, const std::vector<std::size_t>& offset, const Shape& shape);

/// Stacks tensors of equal shape S into shape S + [count] (new last axis).
Tensor stack_last(const std::vector<Tensor>& parts);

/// Adds bias[c] to every element whose last-axis index is c.
Tensor add_bias_last(const Tensor& x, const Tensor& bias);

}  // namespace exset::ad
