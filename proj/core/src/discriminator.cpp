#include "exset/discriminator.hpp"

#include <string>

#include "exset/autodiff/conv.hpp"
#include "exset/autodiff/ops.hpp"
#include "exset/error.hpp"
#include "exset/rng.hpp"

namespace exset {

std::vector<std::array<std::size_t, 3>> DiscriminatorConfig::block_extents() const {
  std::vector<std::array<std::size_t, 3>> out;
  std::size_t h = height, w = width;
  for (const auto& l : layers) {
    if (l.stride < 1) fail_contract("discriminator: stride must be at least 1");
    if (l.kernel < 1 || l.kernel > h || l.kernel > w)
      fail_contract("discriminator: kernel " + std::to_string(l.kernel) + " exceeds the " + std::to_string(h) + "x" +
                    std::to_string(w) + " map");
    h = ad::conv_output_extent(h, l.kernel, l.stride);
    w = ad::conv_output_extent(w, l.kernel, l.stride);
    out.push_back({h, w, l.features});
  }
  return out;
}

void DiscriminatorConfig::validate() const {
  if (height < 1 || width < 1 || channels < 1) fail_contract("discriminator: input extents must be positive");
  for (const auto& l : layers)
    if (l.features < 1) fail_contract("discriminator: feature count must be positive");
  block_extents();
}

std::size_t DiscriminatorConfig::parameter_count() const {
  const auto ext = block_extents();
  std::size_t n = 0, c = channels;
  for (const auto& l : layers) {
    n += l.kernel * l.kernel * c * l.features + l.features;
    c = l.features;
  }
  const std::size_t flat = ext.empty() ? height * width * channels : ext.back()[0] * ext.back()[1] * ext.back()[2];
  return n + flat + 1;
}

DiscriminatorParams init_discriminator(const DiscriminatorConfig& config, std::uint64_t seed) {
  config.validate();
  DiscriminatorParams p{config, std::vector<double>(config.parameter_count(), 0.0), seed};
  const CounterRng rng(derive_seed(seed, {0x64697363ull}));
  std::uint64_t draw = 0;
  auto fill = [&](std::size_t off, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i, ++draw) {
      const auto z = rng.normal_pair(draw / 2);
      p.values[off + i] = 0.02 * z[draw % 2];
    }
  };
  std::size_t off = 0, c = config.channels;
  for (const auto& l : config.layers) {
    const std::size_t nw = l.kernel * l.kernel * c * l.features;
    fill(off, nw);
    off += nw + l.features;  // biases stay 0
    c = l.features;
  }
  fill(off, p.values.size() - off - 1);
  return p;
}

namespace graph {

ad::Tensor discriminator_logit(const DiscriminatorConfig& config, const ad::Tensor& params, const ad::Tensor& field) {
  const Shape expect{config.height, config.width, config.channels};
  if (field.shape() != expect)
    fail_contract("discriminator: field shape does not match the configured " + std::to_string(config.height) + "x" +
                  std::to_string(config.width) + "x" + std::to_string(config.channels) + " input");
  if (params.size() != config.parameter_count()) fail_contract("discriminator: parameter vector size mismatch");
  ad::Tensor x = field;
  std::size_t off = 0, c = config.channels;
  for (const auto& l : config.layers) {
    const std::size_t nw = l.kernel * l.kernel * c * l.features;
    const auto w = ad::reshape(ad::slice(params, off, nw), Shape{l.kernel, l.kernel, c, l.features});
    const auto b = ad::slice(params, off + nw, l.features);
    x = ad::leaky_relu(ad::add_bias_last(ad::conv2d_strided(x, w, l.stride), b), config.leaky_alpha);
    off += nw + l.features;
    c = l.features;
  }
  const std::size_t flat = x.size();
  const auto dense = ad::slice(params, off, flat);
  return ad::add(ad::dot(x, dense), ad::slice(params, off + flat, 1));
}

ad::Tensor discriminator_score(const DiscriminatorConfig& config, const ad::Tensor& params, const ad::Tensor& field) {
  return ad::sigmoid(discriminator_logit(config, params, field));
}

}  // namespace graph

double discriminate(const DiscriminatorParams& params, const std::vector<double>& field) {
  const Shape shape{params.config.height, params.config.width, params.config.channels};
  if (field.size() != numel(shape)) fail_contract("discriminator: field size mismatch");
  return graph::discriminator_score(params.config, ad::Tensor::constant(Shape{params.values.size()}, params.values),
                                    ad::Tensor::constant(shape, field))
      .item();
}

std::vector<double> field_hwc(const PhaseField& field) {
  const std::size_t n = field.channels[0].size();
  std::vector<double> out(3 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) out[3 * i + c] = field.channels[c][i];
  return out;
}

std::vector<double> field_hwc(const PhaseImage& image) {
  std::vector<double> out(3 * image.labels.size(), 0.0);
  for (std::size_t i = 0; i < image.labels.size(); ++i) out[3 * i + image.labels[i] - 1] = 1.0;
  return out;
}

}  // namespace exset
