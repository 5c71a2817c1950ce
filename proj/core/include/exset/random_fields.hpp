#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "exset/autodiff/tensor.hpp"
#include "exset/grid.hpp"

namespace exset {

/// Tabulated radial kernel: value alpha[l] at grid points whose rounded norm is l.
/// The support radius L is alpha.size() - 1.
struct RadialKernelSpec {
  std::vector<double> alpha;
  std::size_t support() const { return alpha.empty() ? 0 : alpha.size() - 1; }
};

/// Parameters alpha_1..alpha_13 of the low-parametric covariance family, stored
/// zero-based (alpha[0] is alpha_1). alpha_1..alpha_3 lie in [0,1], the rest are positive.
struct ParametricCovariance {
  std::array<double, 13> alpha{};
  void validate() const;
};

/// Values on the cube {-h..h}^dim, row-major, centre at index h along each axis.
struct CenteredGrid {
  std::size_t dim = 0;
  std::size_t halfwidth = 0;
  std::vector<double> values;

  Shape shape() const { return Shape(dim, 2 * halfwidth + 1); }
  std::size_t extent() const { return 2 * halfwidth + 1; }
  /// Value at a centred offset (entries beyond dim are ignored); 0 outside the cube.
  double at(const std::vector<long long>& offset) const;
};

using KernelGrid = CenteredGrid;
using CovarianceGrid = CenteredGrid;

/// Real-valued field on a window; extents are x-first, values are x-fastest.
struct RealField {
  std::vector<std::size_t> extents;
  std::vector<double> values;
};

struct NoiseField {
  std::vector<std::size_t> extents;
  std::vector<double> values;
  std::uint64_t seed = 0;
};

KernelGrid build_radial_kernel(const RadialKernelSpec& spec, std::size_t dim);
CovarianceGrid covariance_of_kernel(const KernelGrid& k);

/// Kernel whose autocorrelation approximates rho, truncated to `halfwidth` and
/// renormalized. Negative spectral values are clipped to zero and reported through
/// exset::warn; the count is written to negative_modes when given.
KernelGrid kernel_from_covariance(const CovarianceGrid& rho, std::size_t halfwidth,
                                  std::size_t* negative_modes = nullptr);

double eval_parametric_covariance(const ParametricCovariance& pc, double h);
KernelGrid build_lowparam_kernel(const ParametricCovariance& pc, std::size_t halfwidth, std::size_t dim);

NoiseField sample_white_noise(const std::vector<std::size_t>& extents, std::uint64_t seed);

/// Moving average of the noise with the kernel. The noise lives on the window
/// enlarged by the kernel halfwidth on every side; the result covers the window.
RealField simulate_grf(const KernelGrid& kernel, const NoiseField& noise);
/// Draws the enlarged noise from `seed` and simulates on `window` (x-first extents).
RealField simulate_grf(const KernelGrid& kernel, const std::vector<std::size_t>& window,
                       std::uint64_t seed);

std::pair<RealField, RealField> simulate_correlated_pair(const RealField& xt, const RealField& yt,
                                                         const RealField& zt, double gamma, int sign);
std::pair<RealField, RealField> simulate_chi2_pair(
    const std::vector<std::pair<RealField, RealField>>& pairs);

/// Differentiable constructions used by the calibration; the plain functions above
/// evaluate these on constant inputs.
namespace graph {

/// Radial kernel from a tensor alpha of length L+1, normalized to unit sum of squares.
ad::Tensor radial_kernel(const ad::Tensor& alpha, std::size_t dim);

/// Low-parametric covariance (13 parameters) evaluated at the given distances.
ad::Tensor parametric_covariance(const ad::Tensor& alpha13, const std::vector<double>& h);

/// Real part of the inverse transform of the clipped square root of the spectrum of
/// a centred, symmetric grid. Output has the input's shape.
ad::Tensor spectral_sqrt(const ad::Tensor& rho, std::size_t* negative_modes = nullptr);

/// Low-parametric kernel on {-halfwidth..halfwidth}^dim from the 13 parameters.
ad::Tensor lowparam_kernel(const ad::Tensor& alpha13, std::size_t halfwidth, std::size_t dim,
                           std::size_t* negative_modes = nullptr);

/// Moving average of an enlarged noise tensor; the result shape is the noise shape
/// minus 2*halfwidth per axis.
ad::Tensor grf(const ad::Tensor& kernel, const ad::Tensor& noise);

}  // namespace graph

}  // namespace exset
