#include <string>

#include "exset/io.hpp"
#include "io/json_convert.hpp"

namespace exset {

namespace jsonio {

std::string kind_name(ModelKind k) { return k == ModelKind::HighParametric ? "high" : "low"; }

ModelKind parse_kind(const std::string& s) {
  if (s == "high") return ModelKind::HighParametric;
  if (s == "low") return ModelKind::LowParametric;
  throw DataError("json: unknown model kind '" + s + "' (expected high or low)");
}

json to_json(const ModelParams& p) {
  json j;
  j["kind"] = kind_name(p.kind);
  j["support"] = p.support;
  j["lowparam_halfwidth"] = p.lowparam_halfwidth;
  j["gamma"] = p.gamma;
  j["sigma_x"] = p.sigma_x;
  j["sigma_y"] = p.sigma_y;
  j["lambda_x"] = p.lambda_x;
  j["lambda_y"] = p.lambda_y;
  j["n_dof"] = p.n_dof;
  j["sign"] = p.sign;
  j["voxel_size_um"] = p.voxel_size_um;
  j["s_hat"] = p.s_hat ? json(*p.s_hat) : json(nullptr);
  json kernels = json::array();
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    if (p.kind == ModelKind::HighParametric)
      kernels.push_back(nums(p.radial[f].alpha));
    else
      kernels.push_back(nums(std::vector<double>(p.lowparam[f].alpha.begin(), p.lowparam[f].alpha.end())));
  }
  j["kernels"] = kernels;
  return j;
}

ModelParams params_from(const json& j) {
  ModelParams p;
  p.kind = parse_kind(get<std::string>(j, "kind"));
  get_opt(j, "support", p.support);
  get_opt(j, "lowparam_halfwidth", p.lowparam_halfwidth);
  p.gamma = num(field(j, "gamma"));
  p.sigma_x = num(field(j, "sigma_x"));
  p.sigma_y = num(field(j, "sigma_y"));
  p.lambda_x = num(field(j, "lambda_x"));
  p.lambda_y = num(field(j, "lambda_y"));
  get_opt(j, "n_dof", p.n_dof);
  get_opt(j, "sign", p.sign);
  get_opt(j, "voxel_size_um", p.voxel_size_um);
  if (j.contains("s_hat") && !j.at("s_hat").is_null()) p.s_hat = num(j.at("s_hat"));
  const auto& kernels = field(j, "kernels");
  if (!kernels.is_array() || kernels.size() != kFieldCount)
    throw DataError("json: 'kernels' must hold " + std::to_string(kFieldCount) + " coefficient arrays");
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    const auto v = nums(kernels[f]);
    if (p.kind == ModelKind::HighParametric) {
      p.radial[f].alpha = v;
    } else {
      if (v.size() != 13) throw DataError("json: low-parametric kernel needs 13 coefficients");
      std::copy(v.begin(), v.end(), p.lowparam[f].alpha.begin());
    }
  }
  p.validate();
  return p;
}

json to_json(const TrainConfig& c) {
  json j;
  j["lr"] = c.lr;
  j["lr_d"] = c.lr_d ? json(*c.lr_d) : json(nullptr);
  j["batch"] = c.batch;
  j["n_epoch"] = c.n_epoch;
  j["n_steps"] = c.n_steps;
  j["nu"] = c.nu;
  j["h_max"] = c.h_max;
  j["bandwidth"] = c.bandwidth;
  j["gamma_w"] = c.gamma_w;
  j["window"] = c.window;
  j["min_epochs"] = c.min_epochs;
  j["patience"] = c.patience;
  j["mc_count"] = c.mc_count;
  j["pretrain_steps"] = c.pretrain_steps;
  j["guard"] = c.guard;
  j["disc_loss"] = c.disc_loss == DiscLossVariant::Pseudocode ? "pseudocode"
                   : c.disc_loss == DiscLossVariant::Prose    ? "prose"
                                                              : "least_squares";
  json layers = json::array();
  for (const auto& l : c.discriminator.layers) layers.push_back({l.kernel, l.features, l.stride});
  j["discriminator"] = {{"layers", layers}, {"leaky_alpha", c.discriminator.leaky_alpha}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

TrainConfig train_config_from(const json& j) {
  TrainConfig c;
  if (!j.is_object()) throw DataError("json: training settings must be an object");
  get_opt(j, "lr", c.lr);
  if (j.contains("lr_d") && !j.at("lr_d").is_null()) c.lr_d = get<double>(j, "lr_d");
  get_opt(j, "batch", c.batch);
  get_opt(j, "n_epoch", c.n_epoch);
  get_opt(j, "n_steps", c.n_steps);
  get_opt(j, "nu", c.nu);
  get_opt(j, "h_max", c.h_max);
  get_opt(j, "bandwidth", c.bandwidth);
  get_opt(j, "gamma_w", c.gamma_w);
  get_opt(j, "window", c.window);
  get_opt(j, "min_epochs", c.min_epochs);
  get_opt(j, "patience", c.patience);
  get_opt(j, "mc_count", c.mc_count);
  get_opt(j, "pretrain_steps", c.pretrain_steps);
  get_opt(j, "guard", c.guard);
  if (j.contains("disc_loss")) {
    const auto s = get<std::string>(j, "disc_loss");
    if (s == "pseudocode")
      c.disc_loss = DiscLossVariant::Pseudocode;
    else if (s == "prose")
      c.disc_loss = DiscLossVariant::Prose;
    else if (s == "least_squares")
      c.disc_loss = DiscLossVariant::LeastSquares;
    else
      throw DataError("json: unknown disc_loss '" + s + "'");
  }
  if (j.contains("discriminator")) {
    const auto& d = j.at("discriminator");
    if (d.contains("layers")) {
      c.discriminator.layers.clear();
      for (const auto& l : d.at("layers")) {
        if (!l.is_array() || l.size() != 3) throw DataError("json: discriminator layer must be [kernel, features, stride]");
        c.discriminator.layers.push_back({l[0].get<std::size_t>(), l[1].get<std::size_t>(), l[2].get<std::size_t>()});
      }
    }
    get_opt(d, "leaky_alpha", c.discriminator.leaky_alpha);
  }
  get_opt(j, "seed", c.seed);
  get_opt(j, "threads", c.threads);
  c.discriminator.height = c.discriminator.width = c.window;
  c.discriminator.channels = 3;
  return c;
}

json to_json(const AdamState& s) {
  return {{"m", nums(s.m)}, {"v", nums(s.v)}, {"step", s.step}, {"beta1", s.beta1}, {"beta2", s.beta2},
          {"eps", s.eps}};
}

AdamState adam_from(const json& j) {
  AdamState s;
  s.m = nums(field(j, "m"));
  s.v = nums(field(j, "v"));
  s.step = get<std::uint64_t>(j, "step");
  s.beta1 = get<double>(j, "beta1");
  s.beta2 = get<double>(j, "beta2");
  s.eps = get<double>(j, "eps");
  return s;
}

}  // namespace jsonio

std::string params_to_json(const ModelParams& theta) { return jsonio::to_json(theta).dump(2) + "\n"; }

ModelParams params_from_json(const std::string& text) { return jsonio::params_from(jsonio::parse(text)); }

void save_params(const ModelParams& theta, const std::string& path) { write_file(path, params_to_json(theta)); }

ModelParams load_params(const std::string& path) { return params_from_json(read_file(path)); }

ModelParams RunConfig::model_template() const {
  ModelParams p;
  p.kind = kind;
  p.support = support;
  p.lowparam_halfwidth = lowparam_halfwidth;
  p.n_dof = n_dof;
  p.sign = sign;
  for (auto& r : p.radial) {
    r.alpha.assign(support + 1, 0.0);
    r.alpha[0] = 1.0;
  }
  for (auto& c : p.lowparam) {
    c.alpha.fill(1.0);
    c.alpha[0] = c.alpha[1] = c.alpha[2] = 0.5;
  }
  return p;
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Tpcf: return "tpcf";
    case Algorithm::Gan: return "gan";
    case Algorithm::Combined: return "combined";
  }
  return "";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "tpcf") return Algorithm::Tpcf;
  if (name == "gan") return Algorithm::Gan;
  if (name == "combined") return Algorithm::Combined;
  throw DataError("unknown algorithm '" + name + "' (expected tpcf, gan or combined)");
}

std::string config_to_json(const RunConfig& c) {
  jsonio::json j;
  j["algorithm"] = algorithm_name(c.algorithm);
  j["kind"] = jsonio::kind_name(c.kind);
  j["support"] = c.support;
  j["lowparam_halfwidth"] = c.lowparam_halfwidth;
  j["n_dof"] = c.n_dof;
  j["sign"] = c.sign;
  j["slice_axis"] = c.slice_axis;
  j["data"] = c.data_path;
  j["out"] = c.out_dir;
  j["train"] = jsonio::to_json(c.train);
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
  const auto j = jsonio::parse(text);
  if (!j.is_object()) throw DataError("config: top level must be an object");
  RunConfig c;
  if (j.contains("algorithm")) c.algorithm = parse_algorithm(jsonio::get<std::string>(j, "algorithm"));
  if (j.contains("kind")) c.kind = jsonio::parse_kind(jsonio::get<std::string>(j, "kind"));
  jsonio::get_opt(j, "support", c.support);
  jsonio::get_opt(j, "lowparam_halfwidth", c.lowparam_halfwidth);
  jsonio::get_opt(j, "n_dof", c.n_dof);
  jsonio::get_opt(j, "sign", c.sign);
  jsonio::get_opt(j, "slice_axis", c.slice_axis);
  jsonio::get_opt(j, "data", c.data_path);
  jsonio::get_opt(j, "out", c.out_dir);
  if (j.contains("train")) c.train = jsonio::train_config_from(j.at("train"));
  if (c.slice_axis < 0 || c.slice_axis > 2) throw DataError("config: slice_axis must be 0, 1 or 2");
  return c;
}

void save_config(const RunConfig& config, const std::string& path) { write_file(path, config_to_json(config)); }

RunConfig load_config(const std::string& path) { return config_from_json(read_file(path)); }

}  // namespace exset
