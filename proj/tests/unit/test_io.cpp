#include <doctest.h>

#include <filesystem>
#include <set>

#include "exset/error.hpp"
#include "exset/io.hpp"
#include "helpers.hpp"

using namespace exset;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "exset_io_test";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::size_t parse_offset(const std::string& bytes) {
  try {
    decode_volume(bytes);
  } catch (const ParseError& e) {
    return e.byte_offset();
  }
  return std::string::npos;
}

}  // namespace

TEST_CASE("hand-written volume") {
  std::string file = "EXSETVOL 1\ndims 3\nextents 3 3 3\nvoxel_size_um 0.25\nlegend a b c\norder x-fastest\nend\n";
  std::string payload;
  for (int i = 0; i < 27; ++i) payload.push_back(static_cast<char>(1 + i % 3));
  VolumeMeta meta;
  const auto img = decode_volume(file + payload, &meta);
  CHECK(img.extents == std::vector<std::size_t>{3, 3, 3});
  CHECK(meta.voxel_size_um == 0.25);
  CHECK(meta.legend == "a b c");
  // voxel (x=1, y=2, z=0) is byte 7
  CHECK(img.labels[7] == 2);
  CHECK(encode_volume(img, meta) == file + payload);

  const auto z = slices_of(img, 2);
  REQUIRE(z.size() == 3);
  CHECK(z[1].labels[0] == img.labels[9]);
  const auto x = slices_of(img, 0);
  CHECK(x[2].extents == std::vector<std::size_t>{3, 3});
  // x-slice 2 at (y=1, z=2) is voxel 2 + 3 + 18
  CHECK(x[2].labels[2 * 3 + 1] == img.labels[23]);
  const auto y = slices_of(img, 1);
  CHECK(y[1].labels[1 * 3 + 2] == img.labels[9 + 3 + 2]);
}

TEST_CASE("volume round trip and slices of a 2x2x2 volume") {
  PhaseImage img{{2, 2, 2}, {1, 2, 3, 1, 2, 2, 3, 3}};
  const auto path = tmp_path("v.vol");
  save_volume(img, path, {0.5, "legend text"});
  VolumeMeta m;
  const auto back = load_volume(path, &m);
  CHECK(back.labels == img.labels);
  CHECK(m.voxel_size_um == 0.5);
  const auto s = load_slices(path, 2);
  REQUIRE(s.size() == 2);
  CHECK(s[0].labels == std::vector<std::uint8_t>{1, 2, 3, 1});
  CHECK(s[1].labels == std::vector<std::uint8_t>{2, 2, 3, 3});
  const auto sx = slices_of(img, 0);
  CHECK(sx[0].labels == std::vector<std::uint8_t>{1, 3, 2, 3});
  const auto big = testing::random_image({17, 9, 5}, 3);
  CHECK(decode_volume(encode_volume(big)).labels == big.labels);
  CHECK_THROWS_AS(slices_of(PhaseImage{{2, 2}, {1, 1, 1, 1}}), DataError);
}

TEST_CASE("volume parse errors carry offsets") {
  const PhaseImage img{{2, 2, 2}, {1, 2, 3, 1, 2, 2, 3, 3}};
  const auto good = encode_volume(img);
  const std::size_t header = good.size() - 8;
  CHECK(parse_offset("NOTAVOL 1\n") == 0);
  CHECK(parse_offset(good.substr(0, good.size() - 3)) == good.size() - 3);
  auto bad = good;
  bad[header + 5] = 7;
  CHECK(parse_offset(bad) == header + 5);
  try {
    decode_volume(good.substr(0, good.size() - 3));
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("expected 8 bytes, got 5") != std::string::npos);
  }
  auto key = good;
  key.replace(key.find("order"), 5, "color");
  CHECK(parse_offset(key) == good.find("order"));
  CHECK_THROWS_AS(load_volume(tmp_path("missing.vol")), IoError);
  CHECK_THROWS_AS(encode_volume(PhaseImage{{2}, {1, 4}}), ContractError);
}

TEST_CASE("png output") {
  PhaseImage img{{3, 2, 2}, {1, 2, 3, 3, 2, 1, 2, 2, 2, 2, 2, 2}};
  const auto path = tmp_path("s.png");
  save_slice_png(img, 0, path);
  const auto png = read_png(path);
  CHECK(png.width == 3);
  CHECK(png.height == 2);
  // pixel (1, 0) is phase 2
  CHECK(png.rgb[3] == 255);
  CHECK(png.rgb[4] == 0);
  CHECK(png.rgb[5] == 0);
  CHECK(png.rgb[0] == 128);
  save_slice_png(img, 1, path);
  const auto red = read_png(path);
  for (std::size_t i = 0; i < red.rgb.size(); i += 3) CHECK(red.rgb[i] == 255);

  const auto m = testing::lowparam_model(4);
  save_slice_png(realize_hard(m, {40, 30}, 1), 0, path);
  const auto r = read_png(path);
  std::set<std::array<std::uint8_t, 3>> colors;
  for (std::size_t i = 0; i < r.rgb.size(); i += 3) colors.insert({r.rgb[i], r.rgb[i + 1], r.rgb[i + 2]});
  CHECK(colors.size() <= 3);
  CHECK_THROWS(save_slice_png(img, 2, path));
  CHECK_THROWS_AS(read_png(tmp_path("missing.png")), IoError);
}

TEST_CASE("parameter files") {
  auto low = testing::lowparam_model(5);
  low.s_hat = 0.94;
  low.voxel_size_um = 0.3;
  const auto text = params_to_json(low);
  const auto back = params_from_json(text);
  CHECK(params_to_json(back) == text);
  CHECK(back.s_hat.value() == 0.94);
  CHECK(back.lowparam[3].alpha[4] == low.lowparam[3].alpha[4]);
  CHECK(back.lowparam_halfwidth == 5);
  CHECK(to_raw(back) == to_raw(low));

  const auto high = testing::radial_model(6, 2);
  const auto path = tmp_path("p.json");
  save_params(high, path);
  const auto hb = load_params(path);
  CHECK(hb.kind == ModelKind::HighParametric);
  CHECK(hb.radial[4].alpha == high.radial[4].alpha);
  CHECK(!hb.s_hat.has_value());

  CHECK_THROWS_AS(params_from_json("{\"kind\": \"low\""), ParseError);
  CHECK_THROWS_AS(params_from_json("[1, 2]"), DataError);
  auto bad = low;
  bad.gamma = 2;
  CHECK_THROWS_AS(params_from_json(params_to_json(bad)), DataError);
}

TEST_CASE("run configs") {
  RunConfig c;
  c.algorithm = Algorithm::Gan;
  c.kind = ModelKind::HighParametric;
  c.support = 7;
  c.data_path = "data.vol";
  c.out_dir = "out";
  c.train.lr = 0.003;
  c.train.lr_d = 0.02;
  c.train.disc_loss = DiscLossVariant::LeastSquares;
  c.train.window = 33;
  c.train.h_max = 10;
  c.train.discriminator.layers = {{3, 8, 2}};
  const auto text = config_to_json(c);
  const auto back = config_from_json(text);
  CHECK(config_to_json(back) == text);
  CHECK(back.train.lr_d.value() == 0.02);
  CHECK(back.train.discriminator.height == 33);
  CHECK(back.model_template().kind == ModelKind::HighParametric);
  CHECK(back.model_template().radial[0].alpha.size() == 8);
  CHECK(back.train.disc_loss == DiscLossVariant::LeastSquares);
  CHECK(parse_algorithm(algorithm_name(Algorithm::Tpcf)) == Algorithm::Tpcf);
  CHECK_THROWS(parse_algorithm("sgd"));
}

TEST_CASE("discriminator files") {
  DiscriminatorConfig dc;
  dc.layers = {{3, 4, 2}};
  dc.height = dc.width = 9;
  auto d = init_discriminator(dc, 5);
  d.values[3] = -0.0;
  d.values[4] = 1e-310;
  const auto path = tmp_path("d.bin");
  save_discriminator(d, path);
  const auto back = load_discriminator(path);
  CHECK(back.values == d.values);
  CHECK(std::signbit(back.values[3]));
  CHECK(back.config.height == 9);
  CHECK(back.config.layers[0].features == 4);
  CHECK(back.seed == 5);
  auto bytes = read_file(path);
  write_file(path, bytes.substr(0, bytes.size() - 4));
  CHECK_THROWS_AS(load_discriminator(path), ParseError);
  fs::remove_all(fs::temp_directory_path() / "exset_io_test");
}
