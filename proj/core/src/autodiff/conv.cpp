#include "exset/autodiff/conv.hpp"

#include <Eigen/Core>

#include <string>

#include "exset/error.hpp"
#include "fft.hpp"

namespace exset::ad {

using detail::grad_of;
using detail::make_result;

namespace {

// Kernel index (centred) -> flat index on the periodic grid.
std::vector<std::size_t> embed_index(const Shape& grid, const Shape& kshape) {
  const Strides3 sg(grid), sk(kshape);
  std::array<long long, 3> half{};
  for (int d = 0; d < 3; ++d) half[d] = static_cast<long long>(sk.extent[d] / 2);
  std::vector<std::size_t> idx(numel(kshape));
  auto wrap = [](long long v, std::size_t n) {
    const long long m = static_cast<long long>(n);
    return static_cast<std::size_t>(((v % m) + m) % m);
  };
  for (std::size_t i = 0; i < sk.extent[0]; ++i)
    for (std::size_t j = 0; j < sk.extent[1]; ++j)
      for (std::size_t k = 0; k < sk.extent[2]; ++k)
        idx[sk.index(i, j, k)] = sg.index(wrap(static_cast<long long>(i) - half[0], sg.extent[0]),
                                          wrap(static_cast<long long>(j) - half[1], sg.extent[1]),
                                          wrap(static_cast<long long>(k) - half[2], sg.extent[2]));
  return idx;
}

}  // namespace

Tensor conv_circular(const Tensor& field, const Tensor& kernel) {
  const Shape& grid = field.shape();
  const Shape& ks = kernel.shape();
  if (grid.size() != ks.size() || grid.empty() || grid.size() > 3)
    fail_contract("conv_circular: field rank " + std::to_string(grid.size()) +
                  " does not match kernel rank " + std::to_string(ks.size()));
  for (std::size_t d = 0; d < grid.size(); ++d)
    if (ks[d] % 2 == 0 || ks[d] > grid[d]) fail_contract("conv_circular: kernel does not fit the grid");
  auto idx = std::make_shared<const std::vector<std::size_t>>(embed_index(grid, ks));
  std::vector<double> kgrid(numel(grid), 0.0);
  const auto kv = kernel.values();
  for (std::size_t i = 0; i < kv.size(); ++i) kgrid[(*idx)[i]] += kv[i];

  auto F = std::make_shared<std::vector<fft::Complex>>(fft::forward(grid, field.values().data()));
  auto K = std::make_shared<std::vector<fft::Complex>>(fft::forward(grid, kgrid.data()));
  std::vector<fft::Complex> prod(F->size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = (*F)[i] * (*K)[i];
  auto y = fft::inverse(grid, prod);

  return make_result(grid, std::move(y), {field, kernel}, [grid, idx, F, K](const Node& self) {
    const auto G = fft::forward(grid, self.grad.data());
    if (double* gf = grad_of(self.inputs[0])) {
      std::vector<fft::Complex> p(G.size());
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = G[i] * std::conj((*K)[i]);
      const auto r = fft::inverse(grid, p);
      for (std::size_t i = 0; i < r.size(); ++i) gf[i] += r[i];
    }
    if (double* gk = grad_of(self.inputs[1])) {
      std::vector<fft::Complex> p(G.size());
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = G[i] * std::conj((*F)[i]);
      const auto r = fft::inverse(grid, p);
      for (std::size_t i = 0; i < idx->size(); ++i) gk[i] += r[(*idx)[i]];
    }
  });
}

std::size_t conv_output_extent(std::size_t in, std::size_t k, std::size_t stride) {
  if (stride < 1) fail_contract("conv2d: stride must be at least 1");
  if (k < 1 || k > in) fail_contract("conv2d: kernel larger than input");
  return (in - k) / stride + 1;
}

Tensor conv2d_strided(const Tensor& input, const Tensor& weights, std::size_t stride) {
  if (input.rank() != 3 || weights.rank() != 4)
    fail_contract("conv2d: expected (H,W,C) input and (k,k,C,N) weights");
  const std::size_t H = input.shape()[0], W = input.shape()[1], C = input.shape()[2];
  const std::size_t k = weights.shape()[0], N = weights.shape()[3];
  if (weights.shape()[1] != k || weights.shape()[2] != C)
    fail_contract("conv2d: weight shape inconsistent with input channels");
  const std::size_t Ho = conv_output_extent(H, k, stride), Wo = conv_output_extent(W, k, stride);
  const std::size_t rows = Ho * Wo, cols = k * k * C;

  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  // Patch matrix: row = output pixel, column = (di, dj, c) in weight memory order.
  auto patches = std::make_shared<RowMat>(rows, cols);
  const auto x = input.values();
  for (std::size_t oi = 0; oi < Ho; ++oi)
    for (std::size_t oj = 0; oj < Wo; ++oj) {
      double* row = patches->data() + (oi * Wo + oj) * cols;
      for (std::size_t di = 0; di < k; ++di) {
        const double* src = x.data() + ((oi * stride + di) * W + oj * stride) * C;
        std::copy(src, src + k * C, row + di * k * C);
      }
    }
  const auto wv = weights.storage();
  Eigen::Map<const RowMat> Wm(wv->data(), cols, N);
  std::vector<double> y(rows * N);
  Eigen::Map<RowMat>(y.data(), rows, N).noalias() = (*patches) * Wm;

  return make_result(Shape{Ho, Wo, N}, std::move(y), {input, weights},
                     [=](const Node& self) {
                       Eigen::Map<const RowMat> G(self.grad.data(), rows, N);
                       if (double* gw = grad_of(self.inputs[1]))
                         Eigen::Map<RowMat>(gw, cols, N).noalias() += patches->transpose() * G;
                       if (double* gx = grad_of(self.inputs[0])) {
                         Eigen::Map<const RowMat> Wmat(wv->data(), cols, N);
                         const RowMat gp = G * Wmat.transpose();
                         for (std::size_t oi = 0; oi < Ho; ++oi)
                           for (std::size_t oj = 0; oj < Wo; ++oj) {
                             const double* row = gp.data() + (oi * Wo + oj) * cols;
                             for (std::size_t di = 0; di < k; ++di) {
                               double* dst = gx + ((oi * stride + di) * W + oj * stride) * C;
                               for (std::size_t q = 0; q < k * C; ++q) dst[q] += row[di * k * C + q];
                             }
                           }
                       }
                     });
}

}  // namespace exset::ad
