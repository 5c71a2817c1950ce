#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "exset/autodiff/tensor.hpp"
#include "exset/excursion_model.hpp"
#include "exset/rng.hpp"

namespace testing {

inline std::vector<double> random_values(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::vector<double> v(n);
  exset::CounterRng(seed).fill_normal(v);
  for (auto& x : v) x *= scale;
  return v;
}

/// Central-difference gradient of a scalar function.
inline std::vector<double> numeric_grad(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double fp = f(x);
    x[i] = x0 - h;
    const double fm = f(x);
    x[i] = x0;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

/// Max relative deviation with an absolute floor.
inline double max_rel_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-8) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]) / std::max({std::abs(a[i]), std::abs(b[i]), floor}));
  return m;
}

/// AD gradient of a graph built by `build` from a leaf holding x.
inline std::vector<double> ad_grad(const std::function<exset::ad::Tensor(const exset::ad::Tensor&)>& build,
                                   const std::vector<double>& x) {
  const auto leaf = exset::ad::Tensor::leaf(exset::Shape{x.size()}, x);
  exset::ad::backward(build(leaf));
  return leaf.grad();
}

inline double value_of(const std::function<exset::ad::Tensor(const exset::ad::Tensor&)>& build,
                       const std::vector<double>& x) {
  return build(exset::ad::Tensor::constant(exset::Shape{x.size()}, x)).item();
}

inline exset::PhaseImage random_image(std::vector<std::size_t> extents, std::uint64_t seed) {
  exset::PhaseImage img;
  img.extents = std::move(extents);
  std::size_t n = 1;
  for (auto e : img.extents) n *= e;
  img.labels.resize(n);
  const exset::CounterRng rng(seed);
  for (std::size_t i = 0; i < n; ++i) img.labels[i] = static_cast<std::uint8_t>(1 + rng.uniform_index(i, 3));
  return img;
}

inline exset::ModelParams lowparam_model(std::size_t halfwidth = 6) {
  exset::ModelParams m;
  m.kind = exset::ModelKind::LowParametric;
  m.lowparam_halfwidth = halfwidth;
  for (auto& c : m.lowparam) {
    c.alpha.fill(1.0);
    c.alpha[0] = 0.5;
    c.alpha[1] = 0.5;
    c.alpha[2] = 0.5;
    c.alpha[3] = 0.8;
    c.alpha[4] = 0.3;
  }
  m.gamma = 0.4;
  m.lambda_x = 2.2;
  m.lambda_y = 1.8;
  return m;
}

inline exset::ModelParams radial_model(std::size_t support, std::uint64_t seed = 3) {
  exset::ModelParams m;
  m.kind = exset::ModelKind::HighParametric;
  m.support = support;
  std::size_t f = 0;
  for (auto& r : m.radial) {
    r.alpha.resize(support + 1);
    for (std::size_t l = 0; l <= support; ++l)
      r.alpha[l] = std::exp(-0.3 * static_cast<double>(l)) * (1.0 + 0.1 * std::sin(static_cast<double>(l + f + seed)));
    ++f;
  }
  m.gamma = 0.3;
  m.lambda_x = 2.0;
  m.lambda_y = 1.5;
  return m;
}

}  // namespace testing
