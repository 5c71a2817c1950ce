#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "exset/anisotropy.hpp"
#include "exset/calibration.hpp"
#include "exset/descriptors.hpp"
#include "exset/error.hpp"
#include "exset/io.hpp"
#include "exset/rng.hpp"
#include "exset_cli/cli.hpp"

namespace exset::cli {

namespace fs = std::filesystem;

namespace {

int parse_axis(const std::string& s) {
  if (s == "x" || s == "0") return 0;
  if (s == "y" || s == "1") return 1;
  if (s == "z" || s == "2") return 2;
  fail_contract("axis must be x, y or z (got '" + s + "')");
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

std::string cell(std::optional<double> v) {
  if (!v) return "";
  std::ostringstream s;
  s.precision(10);
  s << *v;
  return s.str();
}

std::string join(const fs::path& dir, const char* name) { return (dir / name).string(); }

}  // namespace

int cmd_fit(const FitArgs& a, std::ostream& out) {
  RunConfig rc = load_config(a.config);
  if (a.algo) rc.algorithm = parse_algorithm(*a.algo);
  if (a.threads) rc.train.threads = *a.threads;
  rc.data_path = a.data;
  rc.out_dir = a.out;
  VolumeMeta meta;
  const auto volume = load_volume(a.data, &meta);
  const auto slices = slices_of(volume, rc.slice_axis);
  ModelParams like = rc.model_template();
  like.voxel_size_um = meta.voxel_size_um;

  make_dir(a.out);
  const fs::path dir(a.out);
  write_file(join(dir, "config.json"), config_to_json(rc));
  TrainHooks hooks;
  hooks.checkpoint_dir = a.out;
  std::optional<TrainState> resume;
  if (a.resume && fs::exists(dir / "state.json")) resume = load_checkpoint(a.out, like);
  const TrainState* r = resume ? &*resume : nullptr;

  TrainResult res;
  switch (rc.algorithm) {
    case Algorithm::Tpcf:
      res = train_tpcf(like, tpcf_data_average(slices, rc.train.h_max, rc.train.bandwidth), rc.train, hooks, r);
      break;
    case Algorithm::Gan:
      res = train_gan(like, slices, rc.train, hooks, r);
      break;
    case Algorithm::Combined:
      res = train_combined(like, slices, tpcf_data_average(slices, rc.train.h_max, rc.train.bandwidth), rc.train,
                           hooks, r);
      break;
  }
  save_checkpoint(a.out, like, res.state, rc.train);
  out << "fit: algorithm=" << algorithm_name(rc.algorithm) << " epochs=" << res.state.epoch
      << " generator_steps=" << res.state.generator_steps + res.state.pretrain_generator_steps
      << " params=" << join(dir, "params.json") << '\n';
  return kOk;
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const auto theta = load_params(a.params);
  PhaseImage img;
  if (a.anisotropic) {
    const auto s = a.s_hat ? a.s_hat : theta.s_hat;
    if (!s) throw DataError("generate: --anisotropic needs s_hat in the parameter file or --s-hat");
    if (a.size.size() != 3) fail_contract("generate: --anisotropic needs three extents");
    img = realize_anisotropic(theta, *s, a.size, a.seed);
  } else {
    img = realize_hard(theta, a.size, a.seed);
  }
  VolumeMeta meta;
  meta.voxel_size_um = theta.voxel_size_um;
  save_volume(img, a.out, meta);
  if (a.png) save_slice_png(img, a.png_z, *a.png);
  out << "generate: wrote " << a.out << '\n';
  return kOk;
}

int cmd_descriptors(const DescriptorsArgs& a, std::ostream& out) {
  VolumeMeta meta;
  const auto img = load_volume(a.volume, &meta);
  const int axis = parse_axis(a.axis);
  if (static_cast<std::size_t>(axis) >= img.dim()) fail_contract("descriptors: axis exceeds the image dimension");
  const double vs = meta.voxel_size_um;
  const auto sum = describe(img, vs, axis, !a.no_transport);
  make_dir(a.out);
  const fs::path dir(a.out);

  std::ostringstream s;
  s.precision(10);
  s << "phase,volume_fraction,mean_chord_um,specific_surface_per_um,constrictivity,tortuosity\n";
  for (int p = 0; p < 3; ++p) {
    const auto& q = sum.phases[p];
    s << p + 1 << ',' << q.volume_fraction << ',' << cell(q.mean_chord) << ',' << q.specific_surface << ','
      << cell(q.constrictivity) << ',' << cell(q.tortuosity) << '\n';
  }
  write_file(join(dir, "summary.csv"), s.str());

  std::size_t h_max = a.h_max;
  for (auto e : img.extents) h_max = std::min(h_max, e - 1);
  std::ostringstream t;
  t.precision(10);
  t << "h_vx,h_um,c11,c12,c13,c22,c23,c33\n";
  if (h_max >= 1) {
    const auto curves = tpcf(img, h_max);
    for (std::size_t h = 0; h < curves.h_grid.size(); ++h) {
      t << curves.h_grid[h] << ',' << curves.h_grid[h] * vs;
      for (const auto& v : curves.values) t << ',' << v[h];
      t << '\n';
    }
  }
  write_file(join(dir, "tpcf.csv"), t.str());

  std::ostringstream c;
  c.precision(10);
  c << "phase,axis,t_vx,t_um,cdf\n";
  const char* names = "xyz";
  for (int p = 1; p <= 3; ++p)
    for (std::size_t ax = 0; ax < img.dim(); ++ax) {
      ChordLengthDistribution cl;
      try {
        cl = chord_lengths(img, p, static_cast<int>(ax), vs);
      } catch (const EmptyDistributionError&) {
        continue;
      }
      const auto cdf = cl.cdf();
      for (std::size_t k = 0; k < cdf.values.size(); ++k)
        c << p << ',' << names[ax] << ',' << k << ',' << static_cast<double>(k) * vs << ',' << cdf.values[k] << '\n';
    }
  write_file(join(dir, "chords.csv"), c.str());
  out << "descriptors: wrote summary.csv, tpcf.csv, chords.csv to " << a.out << '\n';
  return kOk;
}

int cmd_scale_fit(const ScaleFitArgs& a, std::ostream& out) {
  if (a.params.has_value() != a.params_out.has_value())
    fail_contract("scale-fit: --params and --params-out go together");
  const auto img = load_volume(a.volume);
  const ScaleSearch search;
  const auto fit = fit_scale_factor(img, search);
  std::ostringstream s;
  s.precision(17);
  s << "{\n  \"s_hat\": " << fit.s_hat << ",\n  \"objective\": " << fit.objective << ",\n  \"search\": [" << search.lo
    << ", " << search.hi << ", " << search.grid_step << "]\n}\n";
  write_file(a.out, s.str());
  if (a.params) {
    auto p = load_params(*a.params);
    p.s_hat = fit.s_hat;
    save_params(p, *a.params_out);
  }
  out << "scale-fit: s_hat=" << fit.s_hat << '\n';
  return kOk;
}

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  if (a.n < 1) fail_contract("validate: --n must be at least 1");
  const auto theta = load_params(a.params);
  VolumeMeta meta;
  const auto data = load_volume(a.data, &meta);
  const int axis = parse_axis(a.axis);
  if (static_cast<std::size_t>(axis) >= data.dim()) fail_contract("validate: axis exceeds the image dimension");
  const bool transport = !a.no_transport;
  const double vs = meta.voxel_size_um;
  if (a.anisotropic && !theta.s_hat) throw DataError("validate: --anisotropic needs s_hat in the parameter file");

  const auto ref = describe(data, vs, axis, transport);
  std::vector<DescriptorSummary> sims;
  for (std::size_t k = 0; k < a.n; ++k) {
    const auto seed = derive_seed(a.seed, {static_cast<std::uint64_t>(k)});
    const auto img = a.anisotropic ? realize_anisotropic(theta, *theta.s_hat, data.extents, seed)
                                   : realize_hard(theta, data.extents, seed);
    sims.push_back(describe(img, vs, axis, transport));
  }

  using Getter = std::optional<double> (*)(const PhaseSummary&);
  const std::pair<const char*, Getter> rows[] = {
      {"volume_fraction", [](const PhaseSummary& p) -> std::optional<double> { return p.volume_fraction; }},
      {"mean_chord_um", [](const PhaseSummary& p) { return p.mean_chord; }},
      {"specific_surface_per_um", [](const PhaseSummary& p) -> std::optional<double> { return p.specific_surface; }},
      {"constrictivity", [](const PhaseSummary& p) { return p.constrictivity; }},
      {"tortuosity", [](const PhaseSummary& p) { return p.tortuosity; }},
  };
  std::ostringstream s;
  s.precision(10);
  s << "descriptor,phase,data,model_mean,model_std,model_n,deviation,within_3std\n";
  std::size_t within = 0, total = 0;
  for (const auto& [name, get] : rows)
    for (int p = 0; p < 3; ++p) {
      std::vector<double> v;
      for (const auto& m : sims)
        if (auto x = get(m.phases[p])) v.push_back(*x);
      const auto d = get(ref.phases[p]);
      if (v.empty() && !d) continue;
      double mean = 0, var = 0;
      for (double x : v) mean += x;
      if (!v.empty()) mean /= static_cast<double>(v.size());
      for (double x : v) var += (x - mean) * (x - mean);
      const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
      std::optional<double> dev;
      bool ok = false;
      if (d && !v.empty()) {
        dev = *d - mean;
        ok = std::abs(*dev) <= 3.0 * sd + 1e-12 * std::max(1.0, std::abs(mean));
      }
      ++total;
      within += ok ? 1 : 0;
      s << name << ',' << p + 1 << ',' << cell(d) << ',' << (v.empty() ? "" : cell(mean)) << ','
        << (v.empty() ? "" : cell(sd)) << ',' << v.size() << ',' << cell(dev) << ',' << (ok ? 1 : 0) << '\n';
    }
  write_file(a.out, s.str());
  out << "validate: " << within << "/" << total << " descriptors within 3 std of the model mean\n";
  return kOk;
}

}  // namespace exset::cli
