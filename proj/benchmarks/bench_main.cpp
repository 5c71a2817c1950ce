#include <benchmark/benchmark.h>

#include <memory>

#include "exset/autodiff/conv.hpp"
#include "exset/calibration.hpp"
#include "exset/descriptors.hpp"
#include "exset/discriminator.hpp"
#include "exset/excursion_model.hpp"
#include "exset/rng.hpp"

using namespace exset;

namespace {

ModelParams model() {
  ModelParams m;
  m.kind = ModelKind::LowParametric;
  m.lowparam_halfwidth = 10;
  for (auto& c : m.lowparam) {
    c.alpha.fill(1.0);
    c.alpha[0] = c.alpha[1] = c.alpha[2] = 0.5;
    c.alpha[3] = 0.8;
    c.alpha[4] = 0.3;
  }
  m.gamma = 0.4;
  m.lambda_x = 2.2;
  m.lambda_y = 1.8;
  return m;
}

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::vector<double> v(n);
  CounterRng(seed).fill_normal(v);
  return v;
}

void BM_conv_circular(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = ad::Tensor::constant(Shape{n, n}, normals(n * n, 1));
  const auto k = ad::Tensor::constant(Shape{21, 21}, normals(21 * 21, 2));
  for (auto _ : state) benchmark::DoNotOptimize(ad::conv_circular(f, k));
}
BENCHMARK(BM_conv_circular)->Arg(64)->Arg(128)->Arg(256);

void BM_tpcf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto img = realize_hard(model(), {n, n}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(tpcf(img, n / 2));
}
BENCHMARK(BM_tpcf)->Arg(64)->Arg(128);

void BM_realize_soft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = model();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(realize_soft(m, {n, n}, ++seed));
}
BENCHMARK(BM_realize_soft)->Arg(64)->Arg(201);

void BM_discriminator(benchmark::State& state) {
  DiscriminatorConfig c;
  const auto d = init_discriminator(c, 1);
  const auto x = field_hwc(realize_soft(model(), {201, 201}, 4));
  for (auto _ : state) benchmark::DoNotOptimize(discriminate(d, x));
}
BENCHMARK(BM_discriminator);

void BM_loss_tpcf_step(benchmark::State& state) {
  const auto m = model();
  TrainConfig cfg;
  cfg.window = 64;
  cfg.h_max = 32;
  cfg.batch = 8;
  std::vector<PhaseImage> imgs{realize_hard(m, {64, 64}, 5)};
  const auto data = tpcf_data_average(imgs, 32);
  const auto ctx = LossContext::make(m, cfg, &data);
  const auto raw = to_raw(m);
  for (auto _ : state) benchmark::DoNotOptimize(loss_tpcf(ctx, raw, 6));
}
BENCHMARK(BM_loss_tpcf_step)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
