#include "exset/random_fields.hpp"

#include <cmath>
#include <map>
#include <string>

#include "exset/autodiff/conv.hpp"
#include "exset/autodiff/ops.hpp"
#include "exset/error.hpp"
#include "exset/rng.hpp"
#include "fft.hpp"

namespace exset {

namespace {

// Integer offsets of every point of the cube {-h..h}^dim in row-major order,
// reported through f(flat_index, squared_norm, offsets).
template <class F>
void for_each_offset(std::size_t dim, std::size_t h, F f) {
  const long long hh = static_cast<long long>(h);
  const std::size_t n = 2 * h + 1;
  std::size_t total = 1;
  for (std::size_t d = 0; d < dim; ++d) total *= n;
  std::vector<long long> t(dim);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    long long r2 = 0;
    for (std::size_t d = dim; d-- > 0;) {
      t[d] = static_cast<long long>(rem % n) - hh;
      rem /= n;
      r2 += t[d] * t[d];
    }
    f(flat, r2, t);
  }
}

// Flat index on the periodic grid of each centred position (origin moved to index 0).
std::vector<std::size_t> roll_index(std::size_t dim, std::size_t h) {
  const std::size_t n = 2 * h + 1;
  std::size_t total = 1;
  for (std::size_t d = 0; d < dim; ++d) total *= n;
  std::vector<std::size_t> idx(total);
  for_each_offset(dim, h, [&](std::size_t flat, long long, const std::vector<long long>& t) {
    std::size_t r = 0;
    for (std::size_t d = 0; d < dim; ++d)
      r = r * n + static_cast<std::size_t>((t[d] + static_cast<long long>(n)) % static_cast<long long>(n));
    idx[flat] = r;
  });
  return idx;
}

void check_dim(std::size_t dim) {
  if (dim < 1 || dim > 3) fail_contract("kernel dimension must be 1, 2 or 3, got " + std::to_string(dim));
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double sinc_derivative(double x) {
  if (std::abs(x) < 1e-4) return -x / 3.0;
  return (x * std::cos(x) - std::sin(x)) / (x * x);
}

// h^a and its derivative with respect to a, with 0^a = 0 for a > 0.
double powh(double h, double a) { return h > 0 ? std::pow(h, a) : 0.0; }
double dpowh_da(double h, double a) { return h > 0 ? std::pow(h, a) * std::log(h) : 0.0; }

RealField to_field(const ad::Tensor& t) {
  return RealField{extents_from_shape(t.shape()), std::vector<double>(t.values().begin(), t.values().end())};
}

}  // namespace

void ParametricCovariance::validate() const {
  for (int i = 0; i < 3; ++i)
    if (!(alpha[i] >= 0.0 && alpha[i] <= 1.0))
      throw DataError("parametric covariance: alpha_" + std::to_string(i + 1) + " must lie in [0,1]");
  for (int i = 3; i < 13; ++i)
    if (!(alpha[i] > 0.0))
      throw DataError("parametric covariance: alpha_" + std::to_string(i + 1) + " must be positive");
}

double CenteredGrid::at(const std::vector<long long>& offset) const {
  const long long h = static_cast<long long>(halfwidth);
  std::size_t flat = 0;
  for (std::size_t d = 0; d < dim; ++d) {
    const long long o = d < offset.size() ? offset[d] : 0;
    if (o < -h || o > h) return 0.0;
    flat = flat * extent() + static_cast<std::size_t>(o + h);
  }
  return values[flat];
}

namespace graph {

ad::Tensor radial_kernel(const ad::Tensor& alpha, std::size_t dim) {
  check_dim(dim);
  if (alpha.size() == 0) fail_contract("radial kernel: empty alpha");
  const std::size_t L = alpha.size() - 1;
  auto idx = std::make_shared<std::vector<std::size_t>>();
  for_each_offset(dim, L, [&](std::size_t, long long r2, const std::vector<long long>&) {
    const auto l = static_cast<std::size_t>(round_half_away(std::sqrt(static_cast<double>(r2))));
    idx->push_back(l <= L ? l : ad::kZeroIndex);
  });
  bool any = false;
  for (double a : alpha.values()) any = any || a != 0.0;
  if (!any) throw DataError("radial kernel: all coefficients are zero");
  return ad::normalize_l2(ad::gather(alpha, idx, Shape(dim, 2 * L + 1)));
}

ad::Tensor parametric_covariance(const ad::Tensor& alpha13, const std::vector<double>& h) {
  if (alpha13.size() != 13) fail_contract("parametric covariance: expected 13 parameters");
  const auto a = alpha13.values();
  const double a1 = a[0], a2 = a[1], a3 = a[2], a4 = a[3], a5 = a[4], a6 = a[5], a7 = a[6], a8 = a[7],
               a9 = a[8], a10 = a[9], a11 = a[10], a12 = a[11], a13 = a[12];
  const std::size_t n = h.size();
  std::vector<double> rho(n);
  auto jac = std::make_shared<std::vector<double>>(13 * n);  // d rho(h_i) / d alpha_k at [i*13+k]
  for (std::size_t i = 0; i < n; ++i) {
    const double x = h[i];
    if (x < 0) fail_contract("parametric covariance: negative distance");
    const double p11 = powh(x, a11), p12 = powh(x, a12), p13 = powh(x, a13);
    const double s1 = sinc(a4 * x), e1 = std::exp(-a5 * p11);
    const double pe6 = std::exp(-a6 * p12);
    const double s7 = sinc(a7 * x), e8 = std::exp(-a8 * p13);
    const double base = 1.0 + (a9 * x) * (a9 * x);
    const double c = std::pow(base, -a10);
    const double inner = a2 * (a3 * pe6 + (1 - a2) * s7 * e8) + (1 - a3) * c;
    rho[i] = a1 * s1 * e1 + (1 - a1) * inner;

    double* g = jac->data() + 13 * i;
    const double w = 1 - a1;
    g[0] = s1 * e1 - inner;
    g[1] = w * (a3 * pe6 + (1 - 2 * a2) * s7 * e8);
    g[2] = w * (a2 * pe6 - c);
    g[3] = a1 * e1 * x * sinc_derivative(a4 * x);
    g[4] = -a1 * s1 * e1 * p11;
    g[5] = -w * a2 * a3 * pe6 * p12;
    g[6] = w * a2 * (1 - a2) * e8 * x * sinc_derivative(a7 * x);
    g[7] = -w * a2 * (1 - a2) * s7 * e8 * p13;
    g[8] = w * (1 - a3) * (-a10) * std::pow(base, -a10 - 1) * 2 * a9 * x * x;
    g[9] = -w * (1 - a3) * c * std::log(base);
    g[10] = -a1 * s1 * e1 * a5 * dpowh_da(x, a11);
    g[11] = -w * a2 * a3 * pe6 * a6 * dpowh_da(x, a12);
    g[12] = -w * a2 * (1 - a2) * s7 * e8 * a8 * dpowh_da(x, a13);
  }
  return ad::detail::make_result(Shape{n}, std::move(rho), {alpha13}, [jac, n](const ad::Node& self) {
    double* g = ad::detail::grad_of(self.inputs[0]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < 13; ++k) g[k] += self.grad[i] * (*jac)[13 * i + k];
  });
}

ad::Tensor spectral_sqrt(const ad::Tensor& rho, std::size_t* negative_modes) {
  const Shape shape = rho.shape();
  const std::size_t dim = shape.size();
  check_dim(dim);
  for (auto e : shape)
    if (e != shape[0] || e % 2 == 0) fail_contract("spectral sqrt: expected an odd cube");
  const std::size_t h = shape[0] / 2;
  auto roll = std::make_shared<const std::vector<std::size_t>>(roll_index(dim, h));
  const std::size_t N = rho.size();

  std::vector<double> rolled(N);
  for (std::size_t x = 0; x < N; ++x) rolled[(*roll)[x]] = rho[x];
  const auto spec = fft::forward(shape, rolled.data());
  double smax = 0;
  for (const auto& s : spec) smax = std::max(smax, std::abs(s.real()));
  std::size_t negatives = 0;
  auto q = std::make_shared<std::vector<double>>(spec.size());
  std::vector<fft::Complex> qc(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double s = spec[i].real();
    if (s < -1e-12 * smax) ++negatives;
    (*q)[i] = s > 0 ? std::sqrt(s) : 0.0;
    qc[i] = (*q)[i];
  }
  if (negative_modes) *negative_modes = negatives;
  const auto k_rolled = fft::inverse(shape, qc);
  std::vector<double> out(N);
  for (std::size_t x = 0; x < N; ++x) out[x] = k_rolled[(*roll)[x]];
  const double floor = 1e-14 * smax;

  return ad::detail::make_result(shape, std::move(out), {rho}, [shape, roll, q, floor, N](const ad::Node& self) {
    std::vector<double> g_rolled(N);
    for (std::size_t x = 0; x < N; ++x) g_rolled[(*roll)[x]] = self.grad[x];
    // k = Re IFFT(q): dk/dq maps back through Re FFT(.)/N.
    const auto gq = fft::forward(shape, g_rolled.data());
    std::vector<fft::Complex> gs(gq.size());
    for (std::size_t i = 0; i < gs.size(); ++i) {
      const double qi = (*q)[i];
      gs[i] = qi * qi > floor ? gq[i].real() / static_cast<double>(N) / (2.0 * qi) : 0.0;
    }
    // S = Re FFT(rho): d/d rho is N * IFFT of the (real, even) spectrum gradient.
    const auto gr = fft::inverse(shape, gs);
    double* g = ad::detail::grad_of(self.inputs[0]);
    for (std::size_t x = 0; x < N; ++x) g[x] += static_cast<double>(N) * gr[(*roll)[x]];
  });
}

ad::Tensor lowparam_kernel(const ad::Tensor& alpha13, std::size_t halfwidth, std::size_t dim,
                           std::size_t* negative_modes) {
  check_dim(dim);
  if (halfwidth < 1) fail_contract("low-parametric kernel: halfwidth must be at least 1");
  const std::size_t R = 2 * halfwidth;
  std::map<long long, std::size_t> radius_slot;
  for_each_offset(dim, R, [&](std::size_t, long long r2, const std::vector<long long>&) {
    radius_slot.emplace(r2, 0);
  });
  std::vector<double> radii;
  for (auto& [r2, slot] : radius_slot) {
    slot = radii.size();
    radii.push_back(std::sqrt(static_cast<double>(r2)));
  }
  auto idx = std::make_shared<std::vector<std::size_t>>();
  for_each_offset(dim, R, [&](std::size_t, long long r2, const std::vector<long long>&) {
    idx->push_back(radius_slot[r2]);
  });
  const auto table = parametric_covariance(alpha13, radii);
  const auto rho = ad::gather(table, idx, Shape(dim, 2 * R + 1));
  const auto k = spectral_sqrt(rho, negative_modes);
  const auto cropped = ad::crop(k, std::vector<std::size_t>(dim, R - halfwidth), Shape(dim, 2 * halfwidth + 1));
  return ad::normalize_l2(cropped);
}

ad::Tensor grf(const ad::Tensor& kernel, const ad::Tensor& noise) {
  const Shape& ns = noise.shape();
  const Shape& ks = kernel.shape();
  if (ns.size() != ks.size()) fail_contract("grf: kernel and noise dimensions differ");
  const std::size_t h = ks[0] / 2;
  Shape window(ns.size());
  for (std::size_t d = 0; d < ns.size(); ++d) {
    if (ns[d] < 2 * h + 1) fail_contract("grf: window smaller than kernel support");
    window[d] = ns[d] - 2 * h;
  }
  return ad::crop(ad::conv_circular(noise, kernel), std::vector<std::size_t>(ns.size(), h), window);
}

}  // namespace graph

KernelGrid build_radial_kernel(const RadialKernelSpec& spec, std::size_t dim) {
  const auto k = graph::radial_kernel(ad::Tensor::constant(Shape{spec.alpha.size()}, spec.alpha), dim);
  return KernelGrid{dim, spec.support(), std::vector<double>(k.values().begin(), k.values().end())};
}

CovarianceGrid covariance_of_kernel(const KernelGrid& k) {
  check_dim(k.dim);
  const std::size_t h = k.halfwidth, H = 2 * h;
  const Shape grid(k.dim, 2 * H + 1);
  const auto roll = roll_index(k.dim, H);
  // Embed the kernel in the larger cube, then autocorrelate periodically; the cube is
  // large enough that no wrap-around occurs.
  CenteredGrid big{k.dim, H, std::vector<double>(numel(grid), 0.0)};
  for_each_offset(k.dim, H, [&](std::size_t flat, long long, const std::vector<long long>& t) {
    big.values[flat] = k.at(t);
  });
  std::vector<double> rolled(big.values.size());
  for (std::size_t x = 0; x < rolled.size(); ++x) rolled[roll[x]] = big.values[x];
  auto spec = fft::forward(grid, rolled.data());
  for (auto& s : spec) s = std::norm(s);
  const auto r = fft::inverse(grid, spec);
  CovarianceGrid out{k.dim, H, std::vector<double>(r.size())};
  for (std::size_t x = 0; x < r.size(); ++x) out.values[x] = r[roll[x]];
  return out;
}

KernelGrid kernel_from_covariance(const CovarianceGrid& rho, std::size_t halfwidth, std::size_t* negative_modes) {
  check_dim(rho.dim);
  if (!(rho.at(std::vector<long long>(rho.dim, 0)) > 0))
    throw DataError("kernel_from_covariance: rho(0) must be positive");
  if (halfwidth > rho.halfwidth) fail_contract("kernel_from_covariance: halfwidth exceeds covariance grid");
  std::size_t neg = 0;
  const auto k = graph::spectral_sqrt(ad::Tensor::constant(rho.shape(), rho.values), &neg);
  if (neg > 0)
    warn("kernel_from_covariance: " + std::to_string(neg) +
         " negative spectral values clipped; the input is not a valid covariance");
  if (negative_modes) *negative_modes = neg;
  const std::size_t off = rho.halfwidth - halfwidth;
  const auto cropped = ad::crop(k, std::vector<std::size_t>(rho.dim, off), Shape(rho.dim, 2 * halfwidth + 1));
  const auto normed = ad::normalize_l2(cropped);
  return KernelGrid{rho.dim, halfwidth, std::vector<double>(normed.values().begin(), normed.values().end())};
}

double eval_parametric_covariance(const ParametricCovariance& pc, double h) {
  const auto t = graph::parametric_covariance(
      ad::Tensor::constant(Shape{13}, std::vector<double>(pc.alpha.begin(), pc.alpha.end())), {h});
  return t[0];
}

KernelGrid build_lowparam_kernel(const ParametricCovariance& pc, std::size_t halfwidth, std::size_t dim) {
  pc.validate();
  std::size_t neg = 0;
  const auto k = graph::lowparam_kernel(
      ad::Tensor::constant(Shape{13}, std::vector<double>(pc.alpha.begin(), pc.alpha.end())), halfwidth, dim, &neg);
  if (neg > 0)
    warn("low-parametric kernel: " + std::to_string(neg) + " negative spectral values clipped");
  return KernelGrid{dim, halfwidth, std::vector<double>(k.values().begin(), k.values().end())};
}

NoiseField sample_white_noise(const std::vector<std::size_t>& extents, std::uint64_t seed) {
  if (extents.empty()) fail_contract("white noise: no extents");
  for (auto e : extents)
    if (e == 0) fail_contract("white noise: extents must be positive");
  NoiseField n{extents, std::vector<double>(numel(extents)), seed};
  CounterRng(seed).fill_normal(n.values);
  return n;
}

RealField simulate_grf(const KernelGrid& kernel, const NoiseField& noise) {
  const auto k = ad::Tensor::constant(kernel.shape(), kernel.values);
  const auto n = ad::Tensor::constant(shape_from_extents(noise.extents), noise.values);
  return to_field(graph::grf(k, n));
}

RealField simulate_grf(const KernelGrid& kernel, const std::vector<std::size_t>& window, std::uint64_t seed) {
  std::vector<std::size_t> ext = window;
  for (auto& e : ext) e += 2 * kernel.halfwidth;
  return simulate_grf(kernel, sample_white_noise(ext, seed));
}

std::pair<RealField, RealField> simulate_correlated_pair(const RealField& xt, const RealField& yt,
                                                         const RealField& zt, double gamma, int sign) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DataError("correlated pair: gamma must lie in [0,1]");
  if (sign != 1 && sign != -1) fail_contract("correlated pair: sign must be +1 or -1");
  if (xt.extents != yt.extents || xt.extents != zt.extents) fail_contract("correlated pair: windows differ");
  const double a = std::sqrt(1.0 - gamma), b = std::sqrt(gamma);
  RealField xc{xt.extents, std::vector<double>(xt.values.size())}, yc = xc;
  for (std::size_t i = 0; i < xt.values.size(); ++i) {
    xc.values[i] = a * xt.values[i] + b * zt.values[i];
    yc.values[i] = a * yt.values[i] + sign * b * zt.values[i];
  }
  return {std::move(xc), std::move(yc)};
}

std::pair<RealField, RealField> simulate_chi2_pair(const std::vector<std::pair<RealField, RealField>>& pairs) {
  if (pairs.empty()) fail_contract("chi2 pair: need at least one pair");
  const auto& ext = pairs[0].first.extents;
  RealField x{ext, std::vector<double>(numel(ext), 0.0)}, y = x;
  for (const auto& [a, b] : pairs) {
    if (a.extents != ext || b.extents != ext) fail_contract("chi2 pair: windows differ");
    for (std::size_t i = 0; i < x.values.size(); ++i) {
      x.values[i] += a.values[i] * a.values[i];
      y.values[i] += b.values[i] * b.values[i];
    }
  }
  return {std::move(x), std::move(y)};
}

}  // namespace exset
