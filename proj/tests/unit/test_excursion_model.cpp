#include <doctest.h>

#include <cmath>

#include "exset/autodiff/ops.hpp"
#include "exset/descriptors.hpp"
#include "exset/error.hpp"
#include "exset/excursion_model.hpp"
#include "exset/grid.hpp"
#include "helpers.hpp"

using namespace exset;

TEST_CASE("parameter counts") {
  CHECK(param_count(ModelKind::HighParametric, 100) == 505);
  CHECK(param_count(ModelKind::HighParametric, 8) == 45);
  CHECK(param_count(ModelKind::LowParametric) == 70);
  CHECK(to_raw(testing::lowparam_model()).size() == 70);
  CHECK(to_raw(testing::radial_model(8)).size() == 45);
}

TEST_CASE("raw round trip") {
  const auto low = testing::lowparam_model();
  const auto back = from_raw(low, to_raw(low));
  for (std::size_t f = 0; f < kFieldCount; ++f)
    for (int k = 0; k < 13; ++k) CHECK(back.lowparam[f].alpha[k] == doctest::Approx(low.lowparam[f].alpha[k]));
  CHECK(back.gamma == doctest::Approx(low.gamma));
  CHECK(back.sigma_y == doctest::Approx(low.sigma_y));
  CHECK(back.lambda_x == low.lambda_x);

  auto high = testing::radial_model(5);
  const auto hb = from_raw(high, to_raw(high));
  // alpha_0 is anchored to one; the kernel is unchanged because of the normalization
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    CHECK(hb.radial[f].alpha[0] == 1.0);
    const auto k1 = build_radial_kernel(high.radial[f], 2), k2 = build_radial_kernel(hb.radial[f], 2);
    for (std::size_t i = 0; i < k1.values.size(); ++i) CHECK(k1.values[i] == doctest::Approx(k2.values[i]));
  }
  CHECK_THROWS(from_raw(high, std::vector<double>(3)));
}

TEST_CASE("validation") {
  auto m = testing::lowparam_model();
  m.gamma = 1.5;
  CHECK_THROWS_AS(m.validate(), DataError);
  m = testing::lowparam_model();
  m.lowparam[2].alpha[7] = 0;
  CHECK_THROWS_AS(m.validate(), DataError);
  auto h = testing::radial_model(4);
  h.radial[0].alpha.pop_back();
  CHECK_THROWS_AS(h.validate(), DataError);
}

TEST_CASE("graph tensors agree with constants") {
  const auto m = testing::lowparam_model(5);
  const auto raw = to_raw(m);
  const auto g = graph::model_tensors(m, ad::Tensor::constant(Shape{raw.size()}, raw), 2);
  const auto c = graph::model_constants(from_raw(m, raw), 2);
  for (std::size_t f = 0; f < kFieldCount; ++f)
    for (std::size_t i = 0; i < c.kernels[f].size(); ++i) CHECK(g.kernels[f][i] == doctest::Approx(c.kernels[f][i]).epsilon(1e-12));
  CHECK(g.gamma.item() == doctest::Approx(c.gamma.item()));
}

TEST_CASE("realizations are deterministic and labelled 1..3") {
  const auto m = testing::lowparam_model();
  const auto a = realize_hard(m, {40, 30}, 5), b = realize_hard(m, {40, 30}, 5), c = realize_hard(m, {40, 30}, 6);
  CHECK(a.labels == b.labels);
  CHECK(a.labels != c.labels);
  CHECK(a.extents == std::vector<std::size_t>{40, 30});
  for (auto l : a.labels) CHECK((l >= 1 && l <= 3));
  const auto v = realize_hard(m, {12, 10, 8}, 5);
  CHECK(v.voxels() == 960);
}

TEST_CASE("hardened soft field equals the hard realization") {
  const auto m = testing::lowparam_model();
  const auto consts = graph::model_constants(m, 2);
  const auto noise = graph::model_noise(m, {48, 48}, 17);
  const auto args = graph::threshold_args(consts, noise, m.n_dof, m.sign);
  const auto hard = realize_hard(m, {48, 48}, 17);
  const auto hs = harden(realize_soft(m, {48, 48}, 17, 10.0));
  std::size_t checked = 0;
  for (std::size_t i = 0; i < hard.voxels(); ++i) {
    if (args.x[i] == 0.0 || args.y[i] == 0.0) continue;
    CHECK(hs.labels[i] == hard.labels[i]);
    ++checked;
  }
  CHECK(checked > 2000);
}

TEST_CASE("soft channels sum to one and sharpen with nu") {
  const auto m = testing::lowparam_model();
  const auto hard = realize_hard(m, {40, 40}, 3);
  double prev = 2.0;
  for (double nu : {10.0, 100.0, 1000.0}) {
    const auto s = realize_soft(m, {40, 40}, 3, nu);
    double worst = 0;
    for (std::size_t i = 0; i < hard.voxels(); ++i) {
      CHECK(s.channels[0][i] + s.channels[1][i] + s.channels[2][i] == doctest::Approx(1.0));
      for (int c = 0; c < 3; ++c)
        worst = std::max(worst, std::abs(s.channels[c][i] - (hard.labels[i] == c + 1 ? 1.0 : 0.0)));
    }
    CHECK(worst < prev);
    prev = worst;
  }
}

TEST_CASE("raising lambda_x never grows phase 1") {
  auto m = testing::lowparam_model();
  const auto a = realize_hard(m, {50, 50}, 9);
  m.lambda_x += 0.7;
  const auto b = realize_hard(m, {50, 50}, 9);
  for (std::size_t i = 0; i < a.voxels(); ++i)
    if (b.labels[i] == 1) CHECK(a.labels[i] == 1);
}

TEST_CASE("stationarity of the volume fraction") {
  const auto m = testing::lowparam_model();
  double left = 0, right = 0;
  const std::size_t n = 256;
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto img = realize_hard(m, {n, n}, 100 + s);
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t x = 0; x < n; ++x) (x < n / 2 ? left : right) += img.labels[y * n + x] == 1 ? 1.0 : 0.0;
  }
  const double half = 4.0 * n * n / 2;
  CHECK(std::abs(left / half - right / half) < 0.03);
}

TEST_CASE("anisotropic variant samples scaled layers") {
  const auto m = testing::lowparam_model(4);
  CHECK(anisotropic_source_depth(10, 0.94) == 9);
  CHECK(anisotropic_source_depth(10, 1.0) == 10);
  CHECK(anisotropic_source_depth(1, 2.0) == 1);
  const std::vector<std::size_t> ext{16, 12, 10};
  const double s = 0.94;
  const auto aniso = realize_anisotropic(m, s, ext, 4);
  const auto iso = realize_hard(m, {16, 12, anisotropic_source_depth(10, s)}, 4);
  const std::size_t layer = 16 * 12;
  for (std::size_t z = 0; z < 10; ++z) {
    const auto src = static_cast<std::size_t>(round_half_away(static_cast<double>(z) * s));
    for (std::size_t i = 0; i < layer; ++i) CHECK(aniso.labels[z * layer + i] == iso.labels[src * layer + i]);
  }
  CHECK_THROWS(realize_anisotropic(m, 0.0, ext, 1));
}

TEST_CASE("noise streams differ per field and copy") {
  CHECK(noise_stream_seed(1, 0, 0) != noise_stream_seed(1, 1, 0));
  CHECK(noise_stream_seed(1, 2, 0) != noise_stream_seed(1, 2, 1));
  CHECK(noise_stream_seed(1, 0, 0) == noise_stream_seed(1, 0, 5));
  const auto m = testing::lowparam_model(3);
  CHECK(graph::model_noise(m, {8, 8}, 2).size() == 2 + 3 * 2);
}
