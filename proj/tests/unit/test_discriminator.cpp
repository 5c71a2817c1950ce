#include <doctest.h>

#include <cmath>

#include "exset/autodiff/ops.hpp"
#include "exset/discriminator.hpp"
#include "exset/error.hpp"
#include "helpers.hpp"

using namespace exset;

namespace {

DiscriminatorConfig small_config() {
  DiscriminatorConfig c;
  c.layers = {{3, 4, 2}, {2, 5, 1}};
  c.height = 9;
  c.width = 8;
  c.channels = 3;
  c.leaky_alpha = 0.2;
  return c;
}

// plain loops: valid strided conv, bias, leaky relu, then dense + sigmoid
double naive_score(const DiscriminatorConfig& c, const std::vector<double>& p, std::vector<double> x) {
  std::size_t h = c.height, w = c.width, ch = c.channels, off = 0;
  for (const auto& l : c.layers) {
    const std::size_t ho = (h - l.kernel) / l.stride + 1, wo = (w - l.kernel) / l.stride + 1;
    std::vector<double> y(ho * wo * l.features);
    for (std::size_t i = 0; i < ho; ++i)
      for (std::size_t j = 0; j < wo; ++j)
        for (std::size_t n = 0; n < l.features; ++n) {
          double s = p[off + l.kernel * l.kernel * ch * l.features + n];
          for (std::size_t a = 0; a < l.kernel; ++a)
            for (std::size_t b = 0; b < l.kernel; ++b)
              for (std::size_t k = 0; k < ch; ++k)
                s += x[((i * l.stride + a) * w + j * l.stride + b) * ch + k] *
                     p[off + ((a * l.kernel + b) * ch + k) * l.features + n];
          y[(i * wo + j) * l.features + n] = s > 0 ? s : c.leaky_alpha * s;
        }
    off += l.kernel * l.kernel * ch * l.features + l.features;
    x = std::move(y);
    h = ho;
    w = wo;
    ch = l.features;
  }
  double logit = p[off + x.size()];
  for (std::size_t i = 0; i < x.size(); ++i) logit += x[i] * p[off + i];
  return 1 / (1 + std::exp(-logit));
}

}  // namespace

TEST_CASE("parameter count") {
  DiscriminatorConfig c;
  const auto ext = c.block_extents();
  REQUIRE(ext.size() == 4);
  CHECK(ext[0] == std::array<std::size_t, 3>{99, 99, 64});
  CHECK(ext[3] == std::array<std::size_t, 3>{10, 10, 512});
  CHECK(c.parameter_count() == 3136 + 131200 + 524544 + 2097664 + 51201);
  const auto s = small_config();
  // 9x8 -> 4x3 -> 3x2
  CHECK(s.parameter_count() == 3 * 3 * 3 * 4 + 4 + 2 * 2 * 4 * 5 + 5 + 3 * 2 * 5 + 1);
  DiscriminatorConfig bad = s;
  bad.layers.push_back({5, 2, 1});
  CHECK_THROWS_AS(bad.validate(), ContractError);
}

TEST_CASE("initialization") {
  const auto a = init_discriminator(small_config(), 3), b = init_discriminator(small_config(), 3);
  CHECK(a.values == b.values);
  CHECK(a.values != init_discriminator(small_config(), 4).values);
  // first block biases start at zero
  for (std::size_t n = 0; n < 4; ++n) CHECK(a.values[108 + n] == 0.0);
}

TEST_CASE("zero weights score one half") {
  auto p = init_discriminator(small_config(), 1);
  std::fill(p.values.begin(), p.values.end(), 0.0);
  CHECK(discriminate(p, testing::random_values(9 * 8 * 3, 2)) == doctest::Approx(0.5));
  p.values.back() = std::log(0.35 / 0.65);
  CHECK(discriminate(p, testing::random_values(9 * 8 * 3, 2)) == doctest::Approx(0.35));
}

TEST_CASE("forward pass matches plain loops") {
  const auto c = small_config();
  auto p = init_discriminator(c, 7);
  p.values = testing::random_values(p.values.size(), 8, 0.3);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto x = testing::random_values(9 * 8 * 3, 20 + s);
    CHECK(discriminate(p, x) == doctest::Approx(naive_score(c, p.values, x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(discriminate(p, std::vector<double>(5)), ContractError);
}

TEST_CASE("gradients in parameters and input") {
  const auto c = small_config();
  const auto params = testing::random_values(c.parameter_count(), 9, 0.3);
  const auto x = testing::random_values(9 * 8 * 3, 10);
  auto in_params = [&](const ad::Tensor& t) {
    return graph::discriminator_score(c, t, ad::Tensor::constant(Shape{9, 8, 3}, x));
  };
  auto fp = [&](const std::vector<double>& v) { return naive_score(c, v, x); };
  CHECK(testing::max_rel_error(testing::ad_grad(in_params, params), testing::numeric_grad(fp, params), 1e-6) < 1e-5);

  auto in_field = [&](const ad::Tensor& t) {
    return graph::discriminator_logit(c, ad::Tensor::constant(Shape{params.size()}, params), ad::reshape(t, Shape{9, 8, 3}));
  };
  auto fx = [&](const std::vector<double>& v) {
    const double s = naive_score(c, params, v);
    return std::log(s / (1 - s));
  };
  CHECK(testing::max_rel_error(testing::ad_grad(in_field, x), testing::numeric_grad(fx, x), 1e-6) < 1e-5);
}

TEST_CASE("field layout") {
  PhaseImage img{{3, 2}, {1, 2, 3, 3, 2, 1}};
  const auto f = field_hwc(img);
  REQUIRE(f.size() == 18);
  // row y=0, x=1 is phase 2
  CHECK(f[(0 * 3 + 1) * 3 + 1] == 1.0);
  CHECK(f[(1 * 3 + 0) * 3 + 2] == 1.0);
  double total = 0;
  for (double v : f) total += v;
  CHECK(total == 6.0);
  PhaseField soft{{3, 2}, {std::vector<double>(6, 0.2), std::vector<double>(6, 0.3), std::vector<double>(6, 0.5)}, 10};
  CHECK(field_hwc(soft)[5] == 0.5);
}
