#include "exset/autodiff/ops.hpp"

#include <cmath>
#include <string>

#include "exset/error.hpp"

namespace exset::ad {

using detail::grad_of;
using detail::make_result;

namespace {

std::string shape_str(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

enum class Bcast { kNone, kLeft, kRight };

Bcast broadcast_kind(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Bcast::kNone;
  if (a.size() == 1) return Bcast::kLeft;
  if (b.size() == 1) return Bcast::kRight;
  fail_contract(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                shape_str(b.shape()));
}

// Elementwise map y = f(x) with derivative df(x, y).
template <class F, class DF>
Tensor unary(const Tensor& x, F f, DF df) {
  const auto xv = x.storage();
  std::vector<double> y(xv->size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = f((*xv)[i]);
  auto yv = std::make_shared<std::vector<double>>(y);
  return make_result(x.shape(), std::move(y), {x}, [xv, yv, df](const Node& self) {
    double* g = grad_of(self.inputs[0]);
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * df((*xv)[i], (*yv)[i]);
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  const auto kind = broadcast_kind(a, b, "add");
  const auto av = a.storage(), bv = b.storage();
  const Shape shape = kind == Bcast::kLeft ? b.shape() : a.shape();
  std::vector<double> y(numel(shape));
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = (*av)[kind == Bcast::kLeft ? 0 : i] + (*bv)[kind == Bcast::kRight ? 0 : i];
  return make_result(shape, std::move(y), {a, b}, [kind](const Node& self) {
    if (double* ga = grad_of(self.inputs[0]))
      for (std::size_t i = 0; i < self.grad.size(); ++i) ga[kind == Bcast::kLeft ? 0 : i] += self.grad[i];
    if (double* gb = grad_of(self.inputs[1]))
      for (std::size_t i = 0; i < self.grad.size(); ++i) gb[kind == Bcast::kRight ? 0 : i] += self.grad[i];
  });
}

Tensor sub(const Tensor& a, const Tensor& b) { return add(a, neg(b)); }

Tensor mul(const Tensor& a, const Tensor& b) {
  const auto kind = broadcast_kind(a, b, "mul");
  const auto av = a.storage(), bv = b.storage();
  const Shape shape = kind == Bcast::kLeft ? b.shape() : a.shape();
  std::vector<double> y(numel(shape));
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = (*av)[kind == Bcast::kLeft ? 0 : i] * (*bv)[kind == Bcast::kRight ? 0 : i];
  return make_result(shape, std::move(y), {a, b}, [kind, av, bv](const Node& self) {
    const std::size_t ia = kind == Bcast::kLeft ? 0 : 1, ib = kind == Bcast::kRight ? 0 : 1;
    if (double* ga = grad_of(self.inputs[0]))
      for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i * ia] += self.grad[i] * (*bv)[i * ib];
    if (double* gb = grad_of(self.inputs[1]))
      for (std::size_t i = 0; i < self.grad.size(); ++i) gb[i * ib] += self.grad[i] * (*av)[i * ia];
  });
}

Tensor neg(const Tensor& x) { return scale(x, -1.0); }

Tensor scale(const Tensor& x, double c) {
  return unary(x, [c](double v) { return c * v; }, [c](double, double) { return c; });
}

Tensor add_constant(const Tensor& x, double c) {
  return unary(x, [c](double v) { return v + c; }, [](double, double) { return 1.0; });
}

Tensor square(const Tensor& x) {
  return unary(x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Tensor sqrt(const Tensor& x) {
  return unary(
      x, [](double v) { return std::sqrt(v); }, [](double, double y) { return 0.5 / y; });
}

Tensor exp(const Tensor& x) {
  return unary(x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      x,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor softplus(const Tensor& x) {
  return unary(
      x, [](double v) { return v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); },
      [](double v, double) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      });
}

Tensor leaky_relu(const Tensor& x, double alpha) {
  return unary(
      x, [alpha](double v) { return v > 0 ? v : alpha * v; },
      [alpha](double v, double) { return v > 0 ? 1.0 : alpha; });
}

Tensor sum(const Tensor& x) {
  double s = 0;
  for (double v : x.values()) s += v;
  return make_result(Shape{1}, {s}, {x}, [](const Node& self) {
    double* g = grad_of(self.inputs[0]);
    const std::size_t n = self.inputs[0]->value->size();
    for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[0];
  });
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.size())); }

Tensor dot(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size()) fail_contract("dot: size mismatch");
  const auto av = a.storage(), bv = b.storage();
  double s = 0;
  for (std::size_t i = 0; i < av->size(); ++i) s += (*av)[i] * (*bv)[i];
  return make_result(Shape{1}, {s}, {a, b}, [av, bv](const Node& self) {
    const double g = self.grad[0];
    if (double* ga = grad_of(self.inputs[0]))
      for (std::size_t i = 0; i < av->size(); ++i) ga[i] += g * (*bv)[i];
    if (double* gb = grad_of(self.inputs[1]))
      for (std::size_t i = 0; i < av->size(); ++i) gb[i] += g * (*av)[i];
  });
}

Tensor normalize_l2(const Tensor& x) {
  const auto xv = x.storage();
  double ss = 0;
  for (double v : *xv) ss += v * v;
  if (!(ss > 0)) throw DataError("normalize_l2: zero vector cannot be normalized");
  const double norm = std::sqrt(ss);
  std::vector<double> y(xv->size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = (*xv)[i] / norm;
  auto yv = std::make_shared<std::vector<double>>(y);
  return make_result(x.shape(), std::move(y), {x}, [yv, norm](const Node& self) {
    double* g = grad_of(self.inputs[0]);
    double gy = 0;
    for (std::size_t i = 0; i < yv->size(); ++i) gy += self.grad[i] * (*yv)[i];
    for (std::size_t i = 0; i < yv->size(); ++i) g[i] += (self.grad[i] - gy * (*yv)[i]) / norm;
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel(shape) != x.size()) fail_contract("reshape: element count mismatch");
  return make_result(std::move(shape), std::vector<double>(x.values().begin(), x.values().end()), {x},
                     [](const Node& self) {
                       double* g = grad_of(self.inputs[0]);
                       for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
                     });
}

Tensor gather(const Tensor& x, std::shared_ptr<const std::vector<std::size_t>> index, Shape shape) {
  if (numel(shape) != index->size()) fail_contract("gather: index count does not match shape");
  const auto xv = x.storage();
  std::vector<double> y(index->size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::size_t k = (*index)[i];
    if (k == kZeroIndex) {
      y[i] = 0.0;
    } else {
      if (k >= xv->size()) fail_contract("gather: index out of range");
      y[i] = (*xv)[k];
    }
  }
  return make_result(std::move(shape), std::move(y), {x}, [index](const Node& self) {
    double* g = grad_of(self.inputs[0]);
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      if ((*index)[i] != kZeroIndex) g[(*index)[i]] += self.grad[i];
  });
}

Tensor slice(const Tensor& x, std::size_t begin, std::size_t count) {
  if (begin + count > x.size()) fail_contract("slice: range exceeds tensor");
  auto idx = std::make_shared<std::vector<std::size_t>>(count);
  for (std::size_t i = 0; i < count; ++i) (*idx)[i] = begin + i;
  return gather(x, idx, Shape{count});
}

Tensor concat(const std::vector<Tensor>& parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<double> y;
  y.reserve(total);
  for (const auto& p : parts) y.insert(y.end(), p.values().begin(), p.values().end());
  return make_result(Shape{total}, std::move(y), parts, [](const Node& self) {
    std::size_t off = 0;
    for (const auto& in : self.inputs) {
      const std::size_t n = in->value->size();
      if (double* g = grad_of(in))
        for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[off + i];
      off += n;
    }
  });
}

Tensor crop(const Tensor& x, const std::vector<std::size_t>& offset, const Shape& shape) {
  const Shape& in = x.shape();
  if (offset.size() != in.size() || shape.size() != in.size() || in.size() > 3)
    fail_contract("crop: rank mismatch");
  for (std::size_t d = 0; d < in.size(); ++d)
    if (offset[d] + shape[d] > in[d]) fail_contract("crop: block exceeds tensor " + shape_str(in));
  const Strides3 si(in), so(shape);
  const std::size_t pad = 3 - in.size();
  std::array<std::size_t, 3> off{0, 0, 0};
  for (std::size_t d = 0; d < in.size(); ++d) off[pad + d] = offset[d];
  auto idx = std::make_shared<std::vector<std::size_t>>(numel(shape));
  for (std::size_t i = 0; i < so.extent[0]; ++i)
    for (std::size_t j = 0; j < so.extent[1]; ++j)
      for (std::size_t k = 0; k < so.extent[2]; ++k)
        (*idx)[so.index(i, j, k)] = si.index(i + off[0], j + off[1], k + off[2]);
  return gather(x, idx, shape);
}

Tensor stack_last(const std::vector<Tensor>& parts) {
  if (parts.empty()) fail_contract("stack_last: no inputs");
  const Shape base = parts[0].shape();
  for (const auto& p : parts)
    if (p.shape() != base) fail_contract("stack_last: shape mismatch");
  const std::size_t c = parts.size(), n = parts[0].size();
  std::vector<double> y(n * c);
  for (std::size_t k = 0; k < c; ++k) {
    const auto v = parts[k].values();
    for (std::size_t i = 0; i < n; ++i) y[i * c + k] = v[i];
  }
  Shape shape = base;
  shape.push_back(c);
  return make_result(std::move(shape), std::move(y), parts, [c, n](const Node& self) {
    for (std::size_t k = 0; k < c; ++k)
      if (double* g = grad_of(self.inputs[k]))
        for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[i * c + k];
  });
}

Tensor add_bias_last(const Tensor& x, const Tensor& bias) {
  const std::size_t c = x.shape().back();
  if (bias.size() != c) fail_contract("add_bias_last: bias size mismatch");
  const auto bv = bias.storage();
  std::vector<double> y(x.values().begin(), x.values().end());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += (*bv)[i % c];
  return make_result(x.shape(), std::move(y), {x, bias}, [c](const Node& self) {
    if (double* gx = grad_of(self.inputs[0]))
      for (std::size_t i = 0; i < self.grad.size(); ++i) gx[i] += self.grad[i];
    if (double* gb = grad_of(self.inputs[1]))
      for (std::size_t i = 0; i < self.grad.size(); ++i) gb[i % c] += self.grad[i];
  });
}

}  // namespace exset::ad
