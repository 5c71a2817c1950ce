#pragma once

#include "exset/autodiff/tensor.hpp"

namespace exset::ad {

/// Periodic convolution out(x) = sum_t kernel(t) field(x - t) on the field's grid.
/// The kernel has extent 2h+1 per axis with its origin at the centre; it must fit
/// into the field grid. Ranks must agree (1-3).
Tensor conv_circular(const Tensor& field, const Tensor& kernel);

/// Valid-padding strided 2-D convolution of an (H, W, C) input with (k, k, C, N)
/// weights, producing (floor((H-k)/s)+1, floor((W-k)/s)+1, N).
Tensor conv2d_strided(const Tensor& input, const Tensor& weights, std::size_t stride);

/// Output extent of a valid-padding strided convolution along one axis.
std::size_t conv_output_extent(std::size_t in, std::size_t k, std::size_t stride);

}  // namespace exset::ad
