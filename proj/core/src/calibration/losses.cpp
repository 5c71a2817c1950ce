#include <cmath>
#include <string>

#include "exset/autodiff/ops.hpp"
#include "exset/calibration.hpp"
#include "exset/error.hpp"
#include "exset/parallel.hpp"
#include "exset/rng.hpp"

namespace exset {

namespace {

constexpr std::uint64_t kFakeTag = 2;
constexpr std::uint64_t kRealizationTag = 1;

// The model quantities of one step as graph outputs, plus detached copies handed to
// batch members.
struct SharedModel {
  ad::Tensor raw;
  std::vector<ad::Tensor> outputs;  // 5 kernels, then the 5 scalars

  SharedModel(const ModelParams& like, const std::vector<double>& values, bool grad) {
    raw = ad::Tensor::leaf(Shape{values.size()}, values, grad);
    const auto m = graph::model_tensors(like, raw, 2);
    outputs.assign(m.kernels.begin(), m.kernels.end());
    for (const auto& s : {m.gamma, m.sigma_x, m.sigma_y, m.lambda_x, m.lambda_y}) outputs.push_back(s);
  }

  // Fresh leaves sharing the values; the member's tape ends there.
  std::vector<ad::Tensor> leaves(bool grad) const {
    std::vector<ad::Tensor> out;
    for (const auto& t : outputs) out.push_back(ad::Tensor::leaf(t.shape(), t.storage(), grad));
    return out;
  }

  static graph::ModelTensors unpack(const std::vector<ad::Tensor>& v) {
    graph::ModelTensors m;
    for (std::size_t f = 0; f < kFieldCount; ++f) m.kernels[f] = v[f];
    m.gamma = v[5];
    m.sigma_x = v[6];
    m.sigma_y = v[7];
    m.lambda_x = v[8];
    m.lambda_y = v[9];
    return m;
  }

  // d loss / d raw from summed gradients of the outputs.
  std::vector<double> pull_back(const std::vector<std::vector<double>>& seeds) const {
    ad::Tensor total;
    for (std::size_t k = 0; k < outputs.size(); ++k) {
      if (!outputs[k].requires_grad()) continue;
      const auto term = ad::dot(outputs[k], ad::Tensor::constant(outputs[k].shape(), seeds[k]));
      total = total.defined() ? ad::add(total, term) : term;
    }
    if (!total.defined()) return std::vector<double>(raw.size(), 0.0);
    ad::backward(total);
    return raw.grad();
  }
};

struct MemberOut {
  double value = 0;
  double score = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> grads;
};

// Runs `body` for members 0..n-1 in chunks of `threads` and folds the results in
// member order, so the sums do not depend on the thread count.
template <class Body, class Fold>
void ordered_batch(std::size_t n, int threads, Body body, Fold fold) {
  const std::size_t chunk = threads > 1 ? static_cast<std::size_t>(threads) : 1;
  std::vector<MemberOut> slots(chunk);
  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t count = std::min(chunk, n - start);
    parallel_for(count, threads, [&](std::size_t k) { slots[k] = body(start + k); });
    for (std::size_t k = 0; k < count; ++k) {
      fold(start + k, slots[k]);
      slots[k] = MemberOut{};
    }
  }
}

void accumulate(std::vector<std::vector<double>>& acc, const std::vector<std::vector<double>>& g) {
  if (acc.empty()) {
    acc = g;
    return;
  }
  for (std::size_t k = 0; k < g.size(); ++k)
    for (std::size_t i = 0; i < g[k].size(); ++i) acc[k][i] += g[k][i];
}

std::array<ad::Tensor, 3> member_channels(const LossContext& ctx, const graph::ModelTensors& m, std::uint64_t seed) {
  const auto noise = graph::model_noise(ctx.like, {ctx.window, ctx.window}, seed);
  return graph::soft_channels(graph::threshold_args(m, noise, ctx.like.n_dof, ctx.like.sign), ctx.nu);
}

ad::Tensor tpcf_term(const LossContext& ctx, const std::array<ad::Tensor, 3>& ch) {
  if (!ctx.plan || ctx.data_curves.empty()) fail_contract("loss: no data curves set");
  const auto curves = graph::tpcf_curves(ctx.plan, ch);
  return ad::sum(ad::square(ad::sub(curves, ad::Tensor::constant(curves.shape(), ctx.data_curves))));
}

void check_disc(const DiscriminatorParams& disc, const LossContext& ctx) {
  const auto& c = disc.config;
  if (c.height != ctx.window || c.width != ctx.window || c.channels != 3)
    fail_contract("loss: discriminator input does not match the training window");
  if (disc.values.size() != c.parameter_count()) fail_contract("loss: discriminator parameter count mismatch");
}

ad::Tensor score_of(const DiscriminatorParams& disc, const ad::Tensor& params, const std::array<ad::Tensor, 3>& ch) {
  return graph::discriminator_score(disc.config, params, ad::stack_last({ch[0], ch[1], ch[2]}));
}

enum class GenLoss { Tpcf, Adversarial, Combined };

BatchResult generator_batch(const LossContext& ctx, const std::vector<double>& raw, const DiscriminatorParams* disc,
                            GenLoss kind, double gamma_w, std::uint64_t seed) {
  if (ctx.batch < 1) fail_contract("loss: batch must be at least 1");
  if (disc) check_disc(*disc, ctx);
  const SharedModel shared(ctx.like, raw, true);
  ad::Tensor dparams;
  if (disc) dparams = ad::Tensor::constant(Shape{disc->values.size()}, disc->values);

  BatchResult res;
  std::vector<std::vector<double>> acc;
  ordered_batch(
      ctx.batch, ctx.threads,
      [&](std::size_t member) {
        const auto leaves = shared.leaves(true);
        const auto ch = member_channels(ctx, SharedModel::unpack(leaves), member_seed(seed, kRealizationTag, member));
        MemberOut out;
        ad::Tensor loss;
        if (kind != GenLoss::Tpcf) {
          const auto s = score_of(*disc, dparams, ch);
          out.score = s.item();
          loss = ad::square(ad::add_constant(ad::neg(s), 1.0));
        }
        if (kind != GenLoss::Adversarial) {
          const auto t = tpcf_term(ctx, ch);
          loss = kind == GenLoss::Tpcf ? t : ad::add(loss, ad::scale(t, gamma_w));
        }
        out.value = loss.item();
        ad::backward(loss);
        for (const auto& l : leaves) out.grads.push_back(l.grad());
        return out;
      },
      [&](std::size_t, MemberOut& m) {
        res.member_values.push_back(m.value);
        if (kind != GenLoss::Tpcf) res.scores.push_back(m.score);
        accumulate(acc, m.grads);
      });

  const double inv = 1.0 / static_cast<double>(ctx.batch);
  double total = 0;
  for (double v : res.member_values) total += v;
  res.loss = total * inv;
  for (auto& g : acc)
    for (auto& x : g) x *= inv;
  res.grad = shared.pull_back(acc);
  return res;
}

}  // namespace

double TrainConfig::lr_discriminator(ModelKind kind) const {
  if (lr_d) return *lr_d;
  return kind == ModelKind::LowParametric ? 1e-3 : 1e-4;
}

void TrainConfig::validate() const {
  if (!(lr > 0) || (lr_d && !(*lr_d > 0))) fail_contract("train config: learning rates must be positive");
  if (batch < 1) fail_contract("train config: batch must be at least 1");
  if (h_max < 1) fail_contract("train config: h_max must be at least 1");
  if (!(bandwidth > 0)) fail_contract("train config: bandwidth must be positive");
  if (!(gamma_w > 0)) fail_contract("train config: gamma_w must be positive");
  if (!(nu > 0)) fail_contract("train config: nu must be positive");
  if (window <= h_max) fail_contract("train config: window must exceed h_max");
  if (n_steps < 1) fail_contract("train config: n_steps must be at least 1");
  if (mc_count < 1) fail_contract("train config: mc_count must be at least 1");
  if (patience < 1) fail_contract("train config: patience must be at least 1");
}

LossContext LossContext::make(const ModelParams& like, const TrainConfig& config, const TpcfSet* data) {
  config.validate();
  LossContext ctx;
  ctx.like = like;
  ctx.window = config.window;
  ctx.nu = config.nu;
  ctx.batch = config.batch;
  ctx.threads = config.threads;
  ctx.plan = std::make_shared<const TpcfPlan>(Shape{config.window, config.window}, config.h_max, config.bandwidth);
  if (data) ctx.set_data(*data);
  return ctx;
}

void LossContext::set_data(const TpcfSet& data) {
  const std::size_t H = plan->h_count();
  data_curves.assign(6 * H, 0.0);
  for (std::size_t p = 0; p < 6; ++p) {
    if (data.values[p].size() < H)
      throw DataError("loss: data curves cover " + std::to_string(data.values[p].size()) + " distances, need " +
                      std::to_string(H));
    std::copy_n(data.values[p].begin(), H, data_curves.begin() + static_cast<std::ptrdiff_t>(p * H));
  }
}

std::uint64_t member_seed(std::uint64_t seed, std::uint64_t tag, std::size_t member) {
  return derive_seed(seed, {tag, static_cast<std::uint64_t>(member)});
}

BatchResult loss_tpcf(const LossContext& ctx, const std::vector<double>& raw, std::uint64_t seed) {
  return generator_batch(ctx, raw, nullptr, GenLoss::Tpcf, 1.0, seed);
}

BatchResult loss_generator_adv(const LossContext& ctx, const std::vector<double>& raw, const DiscriminatorParams& disc,
                               std::uint64_t seed) {
  return generator_batch(ctx, raw, &disc, GenLoss::Adversarial, 1.0, seed);
}

BatchResult loss_combined(const LossContext& ctx, const std::vector<double>& raw, const DiscriminatorParams& disc,
                          double gamma_w, std::uint64_t seed) {
  if (!(gamma_w > 0)) fail_contract("loss: gamma_w must be positive");
  return generator_batch(ctx, raw, &disc, GenLoss::Combined, gamma_w, seed);
}

double disc_loss_from_scores(const std::vector<double>& real, const std::vector<double>& fake,
                             DiscLossVariant variant) {
  if (real.empty() || fake.empty()) fail_contract("discriminator loss: empty batch");
  double r = 0, f = 0;
  for (double s : real) r += variant == DiscLossVariant::LeastSquares ? (1 - s) * (1 - s) : s * s;
  for (double s : fake) f += variant == DiscLossVariant::LeastSquares ? s * s : (1 - s) * (1 - s);
  r /= static_cast<double>(real.size());
  f /= static_cast<double>(fake.size());
  switch (variant) {
    case DiscLossVariant::Pseudocode: return -r + f;
    case DiscLossVariant::Prose: return -(r + f);
    case DiscLossVariant::LeastSquares: return r + f;
  }
  return 0;
}

DiscBatchResult loss_discriminator(const DiscriminatorParams& disc, const LossContext& ctx,
                                   const std::vector<double>& raw, const std::vector<PhaseImage>& cutouts,
                                   std::uint64_t seed, DiscLossVariant variant) {
  check_disc(disc, ctx);
  const std::size_t n = cutouts.size();
  if (n == 0) fail_contract("discriminator loss: no cutouts");
  for (const auto& c : cutouts)
    if (c.extents != std::vector<std::size_t>{ctx.window, ctx.window})
      fail_contract("discriminator loss: cutout does not match the training window");
  const SharedModel shared(ctx.like, raw, false);
  const auto model = SharedModel::unpack(shared.leaves(false));
  const auto dstore = std::make_shared<const std::vector<double>>(disc.values);
  const double inv = 1.0 / static_cast<double>(n);
  const Shape wshape{ctx.window, ctx.window};

  DiscBatchResult res;
  std::vector<std::vector<double>> acc;
  ordered_batch(
      2 * n, ctx.threads,
      [&](std::size_t member) {
        const bool real = member < n;
        const auto params = ad::Tensor::leaf(Shape{dstore->size()}, dstore, true);
        std::array<ad::Tensor, 3> ch;
        if (real) {
          for (int c = 0; c < 3; ++c) ch[c] = ad::Tensor::constant(wshape, cutouts[member].indicator(c + 1));
        } else {
          ch = member_channels(ctx, model, member_seed(seed, kFakeTag, member - n));
        }
        const auto s = score_of(disc, params, ch);
        ad::Tensor term;
        const auto one_minus = ad::add_constant(ad::neg(s), 1.0);
        switch (variant) {
          case DiscLossVariant::Pseudocode:
            term = real ? ad::neg(ad::square(s)) : ad::square(one_minus);
            break;
          case DiscLossVariant::Prose:
            term = real ? ad::neg(ad::square(s)) : ad::neg(ad::square(one_minus));
            break;
          case DiscLossVariant::LeastSquares:
            term = real ? ad::square(one_minus) : ad::square(s);
            break;
        }
        ad::backward(term);
        MemberOut out;
        out.score = s.item();
        out.grads.push_back(params.grad());
        return out;
      },
      [&](std::size_t member, MemberOut& m) {
        (member < n ? res.real_scores : res.fake_scores).push_back(m.score);
        accumulate(acc, m.grads);
      });
  res.loss = disc_loss_from_scores(res.real_scores, res.fake_scores, variant);
  res.grad = std::move(acc[0]);
  for (auto& x : res.grad) x *= inv;
  return res;
}

std::vector<PhaseImage> sample_cutouts(const std::vector<PhaseImage>& slices, std::size_t window, std::size_t count,
                                       std::uint64_t seed) {
  if (count == 0) return {};
  if (slices.empty()) throw DataError("cutouts: no slices");
  if (window == 0) fail_contract("cutouts: window must be positive");
  for (std::size_t k = 0; k < slices.size(); ++k) {
    const auto& s = slices[k];
    if (s.dim() != 2) throw DataError("cutouts: slice " + std::to_string(k) + " is not 2-D");
    if (s.extents[0] < window || s.extents[1] < window)
      throw DataError("cutouts: slice " + std::to_string(k) + " (" + std::to_string(s.extents[0]) + "x" +
                      std::to_string(s.extents[1]) + ") is smaller than the " + std::to_string(window) + " window");
  }
  const CounterRng rng(seed);
  std::vector<PhaseImage> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto& s = slices[rng.uniform_index(3 * k, slices.size())];
    const std::size_t ox = rng.uniform_index(3 * k + 1, s.extents[0] - window + 1);
    const std::size_t oy = rng.uniform_index(3 * k + 2, s.extents[1] - window + 1);
    PhaseImage c{{window, window}, std::vector<std::uint8_t>(window * window)};
    for (std::size_t y = 0; y < window; ++y)
      std::copy_n(s.labels.begin() + static_cast<std::ptrdiff_t>((oy + y) * s.extents[0] + ox), window,
                  c.labels.begin() + static_cast<std::ptrdiff_t>(y * window));
    out.push_back(std::move(c));
  }
  return out;
}

DataSummary2D summarize_slices(const std::vector<PhaseImage>& slices) {
  if (slices.empty()) throw DataError("summary: no slices");
  DataSummary2D s;
  for (const auto& img : slices) {
    if (img.dim() != 2) throw DataError("summary: slices must be 2-D");
    const auto vf = volume_fractions(img);
    for (int p = 0; p < 3; ++p) {
      s.volume_fraction[p] += vf[p];
      s.specific_surface[p] += specific_surface_2d(img, p + 1, 1.0);
    }
  }
  const double n = static_cast<double>(slices.size());
  for (int p = 0; p < 3; ++p) {
    s.volume_fraction[p] /= n;
    s.specific_surface[p] /= n;
  }
  return s;
}

double early_stop_metric(const ModelParams& theta, const DataSummary2D& data, std::size_t window, std::size_t mc_count,
                         std::uint64_t seed) {
  if (mc_count < 1) fail_contract("early stop metric: mc_count must be at least 1");
  std::vector<PhaseImage> sims;
  for (std::size_t k = 0; k < mc_count; ++k) sims.push_back(realize_hard(theta, {window, window}, member_seed(seed, 4, k)));
  const auto model = summarize_slices(sims);
  double m = 0;
  for (int p = 0; p < 3; ++p)
    m += std::abs(model.volume_fraction[p] - data.volume_fraction[p]) +
         std::abs(model.specific_surface[p] - data.specific_surface[p]);
  return m;
}

bool EarlyStopper::update(std::size_t epoch, double metric) {
  if (metric < best) {
    best = metric;
    best_epoch = epoch;
  }
  return epoch > min_epochs && epoch - best_epoch >= patience;
}

}  // namespace exset
