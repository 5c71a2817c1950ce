#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include "exset/calibration.hpp"
#include "exset/error.hpp"
#include "exset/io.hpp"
#include "exset/rng.hpp"
#include "io/json_convert.hpp"

namespace exset {

namespace {

enum Tag : std::uint64_t {
  kGenerator = 1,
  kDiscFake = 2,
  kCutouts = 3,
  kMetric = 4,
  kPretrainGenerator = 5,
  kPretrainDisc = 6,
};

std::uint64_t step_seed(std::uint64_t seed, Tag tag, std::size_t epoch, std::size_t step) {
  return derive_seed(seed, {static_cast<std::uint64_t>(tag), epoch, step});
}

class Run {
 public:
  Run(const ModelParams& like, const TrainConfig& cfg, const TrainHooks& hooks, Algorithm algo,
      const TpcfSet* data, const TrainState* resume)
      : like_(like), cfg_(cfg), hooks_(hooks), ctx_(LossContext::make(like, cfg, data)) {
    if (resume) {
      if (resume->algorithm != algo) throw DataError("resume: checkpoint belongs to a different algorithm");
      if (resume->raw.size() != param_count(like.kind, like.support))
        throw DataError("resume: checkpoint parameter count does not match the model");
      st = *resume;
    } else {
      st.algorithm = algo;
      st.raw = initial_raw(like, cfg.seed);
      st.stopper.min_epochs = cfg.min_epochs;
      st.stopper.patience = cfg.patience;
      if (algo != Algorithm::Tpcf) {
        auto dc = cfg.discriminator;
        dc.height = dc.width = cfg.window;
        dc.channels = 3;
        st.disc = init_discriminator(dc, cfg.seed);
      }
    }
  }

  void generator_step(std::size_t epoch, std::size_t step, Tag tag, bool tpcf_only) {
    const auto seed = step_seed(cfg_.seed, tag, epoch, step);
    BatchResult r;
    if (tpcf_only)
      r = loss_tpcf(ctx_, st.raw, seed);
    else if (st.algorithm == Algorithm::Gan)
      r = loss_generator_adv(ctx_, st.raw, st.disc, seed);
    else
      r = loss_combined(ctx_, st.raw, st.disc, cfg_.gamma_w, seed);
    if (!std::isfinite(r.loss))
      abort_numerical("training: non-finite loss at epoch " + std::to_string(epoch) + " step " + std::to_string(step));
    try {
      adam_step(st.adam, st.raw, r.grad, cfg_.lr);
    } catch (const NumericalError& e) {
      abort_numerical(e.what());
    }
    LogRow row;
    row.epoch = epoch;
    row.step = step;
    row.loss = r.loss;
    st.log.push_back(row);
  }

  void discriminator_step(std::size_t epoch, std::size_t step, Tag tag, const std::vector<PhaseImage>& slices) {
    const auto cut = sample_cutouts(slices, cfg_.window, cfg_.batch, step_seed(cfg_.seed, kCutouts, epoch, step));
    const auto d = loss_discriminator(st.disc, ctx_, st.raw, cut, step_seed(cfg_.seed, tag, epoch, step),
                                      cfg_.disc_loss);
    if (!std::isfinite(d.loss))
      abort_numerical("training: non-finite discriminator loss at epoch " + std::to_string(epoch) + " step " +
                      std::to_string(step));
    if (d.loss > cfg_.guard) {
      try {
        adam_step(st.adam_d, st.disc.values, d.grad, cfg_.lr_discriminator(like_.kind));
      } catch (const NumericalError& e) {
        abort_numerical(e.what());
      }
      ++st.discriminator_updates;
    }
    LogRow row;
    row.epoch = epoch;
    row.step = step;
    row.loss_d = d.loss;
    st.log.push_back(row);
  }

  // Records the finished epoch; false when the run must not continue.
  bool end_epoch(std::size_t epoch) {
    st.epoch = epoch;
    if (!hooks_.checkpoint_dir.empty()) save_checkpoint(hooks_.checkpoint_dir, like_, st, cfg_);
    if (hooks_.on_epoch && !hooks_.on_epoch(st)) return false;
    return true;
  }

  const LossContext& ctx() const { return ctx_; }

  TrainState st;

 private:
  [[noreturn]] void abort_numerical(const std::string& what) {
    if (!hooks_.checkpoint_dir.empty()) save_checkpoint(hooks_.checkpoint_dir, like_, st, cfg_);
    throw NumericalError(what);
  }

  const ModelParams& like_;
  const TrainConfig& cfg_;
  const TrainHooks& hooks_;
  LossContext ctx_;
};

void check_slices(const std::vector<PhaseImage>& slices, std::size_t window) {
  if (slices.empty()) throw DataError("training: no data slices");
  for (const auto& s : slices)
    if (s.dim() != 2 || s.extents[0] < window || s.extents[1] < window)
      throw DataError("training: every slice must be 2-D and at least " + std::to_string(window) + "x" +
                      std::to_string(window));
}

std::string format_log_csv(const std::vector<LogRow>& log) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,step,loss,loss_D,early_stop_metric\n";
  auto cell = [&](double v) {
    if (std::isnan(v))
      out << "nan";
    else
      out << v;
  };
  for (const auto& r : log) {
    out << r.epoch << ',' << r.step << ',';
    cell(r.loss);
    out << ',';
    cell(r.loss_d);
    out << ',';
    cell(r.metric);
    out << '\n';
  }
  return out.str();
}

}  // namespace

std::vector<double> initial_raw(const ModelParams& like, std::uint64_t seed) {
  std::vector<double> raw(param_count(like.kind, like.support));
  CounterRng(derive_seed(seed, {0x696e6974ull})).fill_normal(raw);
  return raw;
}

TrainResult train_tpcf(const ModelParams& like, const TpcfSet& data, const TrainConfig& config,
                       const TrainHooks& hooks, const TrainState* resume) {
  Run run(like, config, hooks, Algorithm::Tpcf, &data, resume);
  auto& st = run.st;
  for (std::size_t epoch = st.epoch + 1; epoch <= config.n_epoch; ++epoch) {
    for (std::size_t s = 1; s <= config.n_steps; ++s) {
      run.generator_step(epoch, s, kGenerator, true);
      ++st.generator_steps;
    }
    if (!run.end_epoch(epoch)) break;
  }
  st.best_raw = st.raw;
  return {from_raw(like, st.raw), st};
}

TrainResult train_gan(const ModelParams& like, const std::vector<PhaseImage>& slices, const TrainConfig& config,
                      const TrainHooks& hooks, const TrainState* resume) {
  check_slices(slices, config.window);
  Run run(like, config, hooks, Algorithm::Gan, nullptr, resume);
  auto& st = run.st;
  for (std::size_t epoch = st.epoch + 1; epoch <= config.n_epoch; ++epoch) {
    for (std::size_t s = 1; s <= config.n_steps; ++s) {
      run.generator_step(epoch, s, kGenerator, false);
      ++st.generator_steps;
    }
    for (std::size_t s = 1; s <= config.n_steps; ++s) {
      run.discriminator_step(epoch, config.n_steps + s, kDiscFake, slices);
      ++st.discriminator_steps;
    }
    if (!run.end_epoch(epoch)) break;
  }
  st.best_raw = st.raw;
  return {from_raw(like, st.raw), st};
}

TrainResult train_combined(const ModelParams& like, const std::vector<PhaseImage>& slices, const TpcfSet& data,
                           const TrainConfig& config, const TrainHooks& hooks, const TrainState* resume) {
  check_slices(slices, config.window);
  Run run(like, config, hooks, Algorithm::Combined, &data, resume);
  auto& st = run.st;
  if (!st.pretrained) {
    for (std::size_t s = 1; s <= config.pretrain_steps; ++s) {
      run.generator_step(0, s, kPretrainGenerator, true);
      ++st.pretrain_generator_steps;
    }
    for (std::size_t s = 1; s <= config.pretrain_steps; ++s) {
      run.discriminator_step(0, config.pretrain_steps + s, kPretrainDisc, slices);
      ++st.pretrain_discriminator_steps;
    }
    st.pretrained = true;
    st.best_raw = st.raw;
    if (!run.end_epoch(0)) return {from_raw(like, st.raw), st};
  }
  const auto summary = summarize_slices(slices);
  for (std::size_t epoch = st.epoch + 1; epoch <= config.n_epoch && !st.stopped; ++epoch) {
    for (std::size_t s = 1; s <= config.n_steps; ++s) {
      run.generator_step(epoch, s, kGenerator, false);
      ++st.generator_steps;
    }
    for (std::size_t s = 1; s <= config.n_steps; ++s) {
      run.discriminator_step(epoch, config.n_steps + s, kDiscFake, slices);
      ++st.discriminator_steps;
    }
    const double metric = hooks.metric ? hooks.metric(epoch, st.raw)
                                       : early_stop_metric(from_raw(like, st.raw), summary, config.window,
                                                           config.mc_count, step_seed(config.seed, kMetric, epoch, 0));
    st.log.back().metric = metric;
    st.stopped = st.stopper.update(epoch, metric);
    if (st.stopper.improved_at(epoch)) st.best_raw = st.raw;
    if (!run.end_epoch(epoch)) break;
  }
  return {from_raw(like, st.best_raw.empty() ? st.raw : st.best_raw), st};
}

void write_log_csv(const std::string& path, const std::vector<LogRow>& log) { write_file(path, format_log_csv(log)); }

void save_checkpoint(const std::string& dir, const ModelParams& like, const TrainState& state,
                     const TrainConfig& config) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create checkpoint directory '" + dir + "': " + ec.message());
  using jsonio::json;
  json j;
  j["algorithm"] = algorithm_name(state.algorithm);
  j["raw"] = jsonio::nums(state.raw);
  j["adam"] = jsonio::to_json(state.adam);
  j["adam_d"] = jsonio::to_json(state.adam_d);
  j["epoch"] = state.epoch;
  j["pretrained"] = state.pretrained;
  j["stopper"] = {{"min_epochs", state.stopper.min_epochs},
                  {"patience", state.stopper.patience},
                  {"best", jsonio::num(state.stopper.best)},
                  {"best_epoch", state.stopper.best_epoch}};
  j["best_raw"] = jsonio::nums(state.best_raw);
  j["counters"] = {{"generator_steps", state.generator_steps},
                   {"discriminator_steps", state.discriminator_steps},
                   {"discriminator_updates", state.discriminator_updates},
                   {"pretrain_generator_steps", state.pretrain_generator_steps},
                   {"pretrain_discriminator_steps", state.pretrain_discriminator_steps}};
  j["stopped"] = state.stopped;
  json log = json::array();
  for (const auto& r : state.log)
    log.push_back({r.epoch, r.step, jsonio::num(r.loss), jsonio::num(r.loss_d), jsonio::num(r.metric)});
  j["log"] = log;
  j["train"] = jsonio::to_json(config);
  j["has_discriminator"] = !state.disc.values.empty();

  const auto theta = from_raw(like, state.algorithm == Algorithm::Combined && !state.best_raw.empty()
                                        ? state.best_raw
                                        : state.raw);
  const fs::path d(dir);
  write_file((d / "params.json").string(), params_to_json(theta));
  if (!state.disc.values.empty()) save_discriminator(state.disc, (d / "discriminator.bin").string());
  write_log_csv((d / "log.csv").string(), state.log);
  // state last: a complete state.json implies the other files are current
  const auto tmp = (d / "state.json.tmp").string();
  write_file(tmp, j.dump() + "\n");
  fs::rename(tmp, d / "state.json", ec);
  if (ec) throw IoError("cannot finalize checkpoint in '" + dir + "': " + ec.message());
}

TrainState load_checkpoint(const std::string& dir, const ModelParams& like) {
  namespace fs = std::filesystem;
  const fs::path d(dir);
  const auto j = jsonio::parse(read_file((d / "state.json").string()));
  TrainState st;
  try {
    st.algorithm = parse_algorithm(jsonio::get<std::string>(j, "algorithm"));
    st.raw = jsonio::nums(jsonio::field(j, "raw"));
    st.adam = jsonio::adam_from(jsonio::field(j, "adam"));
    st.adam_d = jsonio::adam_from(jsonio::field(j, "adam_d"));
    st.epoch = jsonio::get<std::size_t>(j, "epoch");
    st.pretrained = jsonio::get<bool>(j, "pretrained");
    const auto& s = jsonio::field(j, "stopper");
    st.stopper.min_epochs = jsonio::get<std::size_t>(s, "min_epochs");
    st.stopper.patience = jsonio::get<std::size_t>(s, "patience");
    st.stopper.best = jsonio::num(jsonio::field(s, "best"));
    st.stopper.best_epoch = jsonio::get<std::size_t>(s, "best_epoch");
    st.best_raw = jsonio::nums(jsonio::field(j, "best_raw"));
    const auto& c = jsonio::field(j, "counters");
    st.generator_steps = jsonio::get<std::size_t>(c, "generator_steps");
    st.discriminator_steps = jsonio::get<std::size_t>(c, "discriminator_steps");
    st.discriminator_updates = jsonio::get<std::size_t>(c, "discriminator_updates");
    st.pretrain_generator_steps = jsonio::get<std::size_t>(c, "pretrain_generator_steps");
    st.pretrain_discriminator_steps = jsonio::get<std::size_t>(c, "pretrain_discriminator_steps");
    st.stopped = jsonio::get<bool>(j, "stopped");
    for (const auto& r : jsonio::field(j, "log")) {
      if (!r.is_array() || r.size() != 5) throw DataError("checkpoint: malformed log row");
      LogRow row;
      row.epoch = r[0].get<std::size_t>();
      row.step = r[1].get<std::size_t>();
      row.loss = jsonio::num(r[2]);
      row.loss_d = jsonio::num(r[3]);
      row.metric = jsonio::num(r[4]);
      st.log.push_back(row);
    }
    if (jsonio::get<bool>(j, "has_discriminator")) st.disc = load_discriminator((d / "discriminator.bin").string());
  } catch (const jsonio::json::exception& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  if (st.raw.size() != param_count(like.kind, like.support))
    throw DataError("checkpoint: parameter count does not match the model");
  return st;
}

}  // namespace exset
