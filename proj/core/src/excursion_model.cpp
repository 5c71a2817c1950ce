#include "exset/excursion_model.hpp"

#include <cmath>
#include <string>

#include "exset/autodiff/ops.hpp"
#include "exset/error.hpp"
#include "exset/rng.hpp"

namespace exset {

namespace {

constexpr std::size_t kScalarCount = 5;

double logit(double p) {
  p = std::clamp(p, 1e-12, 1.0 - 1e-12);
  return std::log(p / (1.0 - p));
}

double inv_softplus(double y) {
  if (!(y > 0)) throw DataError("parameter must be positive for the softplus map");
  return y > 30 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
}

double sigmoid(double x) { return x >= 0 ? 1 / (1 + std::exp(-x)) : std::exp(x) / (1 + std::exp(x)); }
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

std::size_t block_size(const ModelParams& m) { return m.kind == ModelKind::HighParametric ? m.support : 13; }

void check_extents(const std::vector<std::size_t>& extents) {
  if (extents.empty() || extents.size() > 3) fail_contract("realization: window must be 1-, 2- or 3-dimensional");
  for (auto e : extents)
    if (e == 0) fail_contract("realization: extents must be positive");
}

PhaseImage labels_from_args(const graph::ThresholdArgs& args) {
  PhaseImage img;
  img.extents = extents_from_shape(args.x.shape());
  img.labels.resize(args.x.size());
  const auto ax = args.x.values(), ay = args.y.values();
  for (std::size_t i = 0; i < img.labels.size(); ++i)
    img.labels[i] = ax[i] >= 0 ? 1 : (ay[i] >= 0 ? 2 : 3);
  return img;
}

}  // namespace

void ModelParams::validate() const {
  if (kind == ModelKind::HighParametric) {
    for (const auto& r : radial)
      if (r.alpha.size() != support + 1)
        throw DataError("model: radial kernel needs " + std::to_string(support + 1) + " coefficients");
  } else {
    for (const auto& p : lowparam) p.validate();
    if (lowparam_halfwidth < 1) throw DataError("model: low-parametric halfwidth must be at least 1");
  }
  if (!(gamma >= 0 && gamma <= 1)) throw DataError("model: gamma must lie in [0,1]");
  if (!(sigma_x > 0 && sigma_y > 0)) throw DataError("model: sigma_x and sigma_y must be positive");
  if (!std::isfinite(lambda_x) || !std::isfinite(lambda_y)) throw DataError("model: thresholds must be finite");
  if (n_dof < 1) throw DataError("model: n_dof must be at least 1");
  if (sign != 1 && sign != -1) throw DataError("model: sign must be +1 or -1");
  if (!(voxel_size_um > 0)) throw DataError("model: voxel size must be positive");
  if (s_hat && !(*s_hat > 0)) throw DataError("model: s_hat must be positive");
}

std::size_t param_count(ModelKind kind, std::size_t support) {
  return kind == ModelKind::HighParametric ? kFieldCount * support + kScalarCount : kFieldCount * 13 + kScalarCount;
}

std::vector<double> PhaseImage::indicator(int phase) const {
  std::vector<double> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] == phase ? 1.0 : 0.0;
  return out;
}

PhaseImage harden(const PhaseField& field) {
  PhaseImage img{field.extents, std::vector<std::uint8_t>(field.channels[0].size())};
  for (std::size_t i = 0; i < img.labels.size(); ++i) {
    const double c1 = field.channels[0][i], c2 = field.channels[1][i];
    img.labels[i] = c1 > 0.5 ? 1 : (c2 > 0.5 * (1.0 - c1) ? 2 : 3);
  }
  return img;
}

std::vector<double> to_raw(const ModelParams& theta) {
  theta.validate();
  std::vector<double> raw;
  raw.reserve(param_count(theta.kind, theta.support));
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    if (theta.kind == ModelKind::HighParametric) {
      const auto& a = theta.radial[f].alpha;
      if (a[0] == 0.0) throw DataError("model: alpha_0 = 0 cannot be expressed with alpha_0 fixed to 1");
      for (std::size_t l = 1; l < a.size(); ++l) raw.push_back(a[l] / a[0]);
    } else {
      const auto& a = theta.lowparam[f].alpha;
      for (int k = 0; k < 3; ++k) raw.push_back(logit(a[k]));
      for (int k = 3; k < 13; ++k) raw.push_back(inv_softplus(a[k]));
    }
  }
  raw.push_back(logit(theta.gamma));
  raw.push_back(inv_softplus(theta.sigma_x));
  raw.push_back(inv_softplus(theta.sigma_y));
  raw.push_back(theta.lambda_x);
  raw.push_back(theta.lambda_y);
  return raw;
}

ModelParams from_raw(const ModelParams& like, const std::vector<double>& raw) {
  if (raw.size() != param_count(like.kind, like.support))
    fail_contract("from_raw: expected " + std::to_string(param_count(like.kind, like.support)) + " values, got " +
                  std::to_string(raw.size()));
  ModelParams m = like;
  const std::size_t B = block_size(like);
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    const double* r = raw.data() + f * B;
    if (like.kind == ModelKind::HighParametric) {
      m.radial[f].alpha.assign(B + 1, 1.0);
      for (std::size_t l = 0; l < B; ++l) m.radial[f].alpha[l + 1] = r[l];
    } else {
      for (int k = 0; k < 3; ++k) m.lowparam[f].alpha[k] = sigmoid(r[k]);
      for (int k = 3; k < 13; ++k) m.lowparam[f].alpha[k] = softplus(r[k]);
    }
  }
  const double* s = raw.data() + kFieldCount * B;
  m.gamma = sigmoid(s[0]);
  m.sigma_x = softplus(s[1]);
  m.sigma_y = softplus(s[2]);
  m.lambda_x = s[3];
  m.lambda_y = s[4];
  return m;
}

std::uint64_t noise_stream_seed(std::uint64_t seed, std::size_t field, std::size_t copy) {
  const std::uint64_t stream = field < 2 ? field : 2 + 3 * copy + (field - 2);
  return derive_seed(seed, {0x6e6f697365ull, stream});
}

namespace graph {

ModelTensors model_tensors(const ModelParams& like, const ad::Tensor& raw, std::size_t dim) {
  const std::size_t B = block_size(like);
  if (raw.size() != param_count(like.kind, like.support)) fail_contract("model_tensors: raw vector size mismatch");
  ModelTensors m;
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    const auto block = ad::slice(raw, f * B, B);
    if (like.kind == ModelKind::HighParametric) {
      const auto alpha = ad::concat({ad::Tensor::constant(Shape{1}, {1.0}), block});
      m.kernels[f] = radial_kernel(alpha, dim);
    } else {
      const auto alpha13 = ad::concat({ad::sigmoid(ad::slice(block, 0, 3)), ad::softplus(ad::slice(block, 3, 10))});
      m.kernels[f] = lowparam_kernel(alpha13, like.lowparam_halfwidth, dim);
    }
  }
  const std::size_t s = kFieldCount * B;
  m.gamma = ad::sigmoid(ad::slice(raw, s, 1));
  m.sigma_x = ad::softplus(ad::slice(raw, s + 1, 1));
  m.sigma_y = ad::softplus(ad::slice(raw, s + 2, 1));
  m.lambda_x = ad::slice(raw, s + 3, 1);
  m.lambda_y = ad::slice(raw, s + 4, 1);
  return m;
}

ModelTensors model_constants(const ModelParams& theta, std::size_t dim) {
  theta.validate();
  ModelTensors m;
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    const KernelGrid k = theta.kind == ModelKind::HighParametric
                             ? build_radial_kernel(theta.radial[f], dim)
                             : build_lowparam_kernel(theta.lowparam[f], theta.lowparam_halfwidth, dim);
    m.kernels[f] = ad::Tensor::constant(k.shape(), k.values);
  }
  m.gamma = ad::Tensor::scalar(theta.gamma);
  m.sigma_x = ad::Tensor::scalar(theta.sigma_x);
  m.sigma_y = ad::Tensor::scalar(theta.sigma_y);
  m.lambda_x = ad::Tensor::scalar(theta.lambda_x);
  m.lambda_y = ad::Tensor::scalar(theta.lambda_y);
  return m;
}

std::vector<ad::Tensor> model_noise(const ModelParams& theta, const std::vector<std::size_t>& extents,
                                    std::uint64_t seed) {
  check_extents(extents);
  std::vector<std::size_t> ext = extents;
  for (auto& e : ext) e += 2 * theta.kernel_halfwidth();
  const Shape shape = shape_from_extents(ext);
  std::vector<ad::Tensor> out;
  auto draw = [&](std::size_t field, std::size_t copy) {
    auto n = sample_white_noise(ext, noise_stream_seed(seed, field, copy));
    out.push_back(ad::Tensor::constant(shape, std::move(n.values)));
  };
  draw(0, 0);
  draw(1, 0);
  for (int i = 0; i < theta.n_dof; ++i)
    for (std::size_t f = 2; f < kFieldCount; ++f) draw(f, static_cast<std::size_t>(i));
  return out;
}

ThresholdArgs threshold_args(const ModelTensors& m, const std::vector<ad::Tensor>& noise, int n_dof, int sign) {
  if (noise.size() != 2 + 3 * static_cast<std::size_t>(n_dof)) fail_contract("threshold_args: wrong noise count");
  const auto X = grf(m.kernels[0], noise[0]);
  const auto Y = grf(m.kernels[1], noise[1]);
  const auto a = ad::sqrt(ad::add_constant(ad::neg(m.gamma), 1.0));
  const auto b = ad::sqrt(m.gamma);
  ad::Tensor xp, yp;
  for (int i = 0; i < n_dof; ++i) {
    const std::size_t base = 2 + 3 * static_cast<std::size_t>(i);
    const auto xt = grf(m.kernels[2], noise[base]);
    const auto yt = grf(m.kernels[3], noise[base + 1]);
    const auto zt = ad::mul(b, grf(m.kernels[4], noise[base + 2]));
    const auto xc = ad::add(ad::mul(a, xt), zt);
    const auto yc = sign > 0 ? ad::add(ad::mul(a, yt), zt) : ad::sub(ad::mul(a, yt), zt);
    xp = i == 0 ? ad::square(xc) : ad::add(xp, ad::square(xc));
    yp = i == 0 ? ad::square(yc) : ad::add(yp, ad::square(yc));
  }
  ThresholdArgs args;
  args.x = ad::sub(ad::add(xp, ad::mul(m.sigma_x, X)), m.lambda_x);
  args.y = ad::sub(ad::add(yp, ad::mul(m.sigma_y, Y)), m.lambda_y);
  return args;
}

std::array<ad::Tensor, 3> soft_channels(const ThresholdArgs& args, double nu) {
  if (!(nu > 0)) fail_contract("soft channels: nu must be positive");
  const auto c1 = ad::sigmoid(ad::scale(args.x, nu));
  const auto c2 = ad::mul(ad::sigmoid(ad::scale(args.y, nu)), ad::add_constant(ad::neg(c1), 1.0));
  const auto c3 = ad::add_constant(ad::neg(ad::add(c1, c2)), 1.0);
  return {c1, c2, c3};
}

}  // namespace graph

PhaseImage realize_hard(const ModelParams& theta, const std::vector<std::size_t>& extents, std::uint64_t seed) {
  const auto m = graph::model_constants(theta, extents.size());
  const auto noise = graph::model_noise(theta, extents, seed);
  return labels_from_args(graph::threshold_args(m, noise, theta.n_dof, theta.sign));
}

PhaseField realize_soft(const ModelParams& theta, const std::vector<std::size_t>& extents, std::uint64_t seed,
                        double nu) {
  const auto m = graph::model_constants(theta, extents.size());
  const auto noise = graph::model_noise(theta, extents, seed);
  const auto ch = graph::soft_channels(graph::threshold_args(m, noise, theta.n_dof, theta.sign), nu);
  PhaseField f;
  f.extents = extents;
  f.nu = nu;
  for (int c = 0; c < 3; ++c) f.channels[c].assign(ch[c].values().begin(), ch[c].values().end());
  return f;
}

std::size_t anisotropic_source_depth(std::size_t nz, double s_hat) {
  if (!(s_hat > 0)) fail_contract("anisotropic: s_hat must be positive");
  if (nz == 0) fail_contract("anisotropic: empty z extent");
  return static_cast<std::size_t>(round_half_away(static_cast<double>(nz - 1) * s_hat)) + 1;
}

PhaseImage realize_anisotropic(const ModelParams& theta, double s_hat, const std::vector<std::size_t>& extents,
                               std::uint64_t seed) {
  if (extents.size() != 3) fail_contract("anisotropic: extents must be 3-D");
  const std::size_t nx = extents[0], ny = extents[1], nz = extents[2];
  const std::size_t depth = anisotropic_source_depth(nz, s_hat);
  const PhaseImage iso = realize_hard(theta, {nx, ny, depth}, seed);
  PhaseImage out{extents, std::vector<std::uint8_t>(nx * ny * nz)};
  const std::size_t layer = nx * ny;
  for (std::size_t z = 0; z < nz; ++z) {
    const auto src = static_cast<std::size_t>(round_half_away(static_cast<double>(z) * s_hat));
    std::copy_n(iso.labels.begin() + static_cast<std::ptrdiff_t>(src * layer), layer,
                out.labels.begin() + static_cast<std::ptrdiff_t>(z * layer));
  }
  return out;
}

}  // namespace exset
