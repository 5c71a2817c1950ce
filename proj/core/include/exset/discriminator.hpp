#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "exset/autodiff/tensor.hpp"
#include "exset/excursion_model.hpp"

namespace exset {

struct ConvLayerSpec {
  std::size_t kernel = 4;
  std::size_t features = 64;
  std::size_t stride = 2;
};

struct DiscriminatorConfig {
  std::vector<ConvLayerSpec> layers{{4, 64, 2}, {4, 128, 2}, {4, 256, 2}, {4, 512, 2}};
  double leaky_alpha = 0.2;
  std::size_t height = 201;
  std::size_t width = 201;
  std::size_t channels = 3;

  /// Output (height, width, features) of every conv block.
  std::vector<std::array<std::size_t, 3>> block_extents() const;
  std::size_t parameter_count() const;
  void validate() const;
};

/// All weights in one flat vector: per block the (k,k,C,N) weights then N biases,
/// then the dense weights (flattened final map) and the dense bias.
struct DiscriminatorParams {
  DiscriminatorConfig config;
  std::vector<double> values;
  std::uint64_t seed = 0;
};

DiscriminatorParams init_discriminator(const DiscriminatorConfig& config, std::uint64_t seed);

/// Score in (0,1) of a (height, width, channels) field given row-major.
double discriminate(const DiscriminatorParams& params, const std::vector<double>& field_hwc);

/// One-hot or soft field as a (height, width, 3) array.
std::vector<double> field_hwc(const PhaseField& field);
std::vector<double> field_hwc(const PhaseImage& image);

namespace graph {

/// Differentiable score; `params` is the flat parameter vector and `field` has
/// shape (height, width, channels).
ad::Tensor discriminator_score(const DiscriminatorConfig& config, const ad::Tensor& params, const ad::Tensor& field);

/// Logit before the final sigmoid.
ad::Tensor discriminator_logit(const DiscriminatorConfig& config, const ad::Tensor& params, const ad::Tensor& field);

}  // namespace graph

}  // namespace exset
