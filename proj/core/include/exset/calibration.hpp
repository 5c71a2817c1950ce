#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "exset/descriptors.hpp"
#include "exset/discriminator.hpp"
#include "exset/excursion_model.hpp"

namespace exset {

enum class DiscLossVariant {
  Pseudocode,   // -mean D(real)^2 + mean (1 - D(fake))^2
  Prose,        // -(mean D(real)^2 + mean (1 - D(fake))^2)
  LeastSquares  // mean (1 - D(real))^2 + mean D(fake)^2
};

enum class Algorithm { Tpcf, Gan, Combined };

struct TrainConfig {
  double lr = 1e-4;
  std::optional<double> lr_d;  // default 1e-4, or 1e-3 for low-parametric models
  std::size_t batch = 32;
  std::size_t n_epoch = 5000;
  std::size_t n_steps = 10;
  double nu = 10.0;
  std::size_t h_max = 100;
  double bandwidth = 0.5;
  double gamma_w = 1.0;
  std::size_t window = 201;
  std::size_t min_epochs = 100;
  std::size_t patience = 500;
  std::size_t mc_count = 8;
  std::size_t pretrain_steps = 100;
  double guard = 0.4;
  DiscLossVariant disc_loss = DiscLossVariant::Pseudocode;
  DiscriminatorConfig discriminator{};
  std::uint64_t seed = 0;
  int threads = 1;

  double lr_discriminator(ModelKind kind) const;
  void validate() const;
};

struct AdamState {
  std::vector<double> m, v;
  std::uint64_t step = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

/// One bias-corrected Adam update in place. A NaN or infinite gradient aborts with
/// NumericalError before anything is modified.
void adam_step(AdamState& state, std::vector<double>& params, const std::vector<double>& grads, double lr);

/// Uniform random slice and top-left corner per cutout (square window, 2-D slices).
std::vector<PhaseImage> sample_cutouts(const std::vector<PhaseImage>& slices, std::size_t window, std::size_t count,
                                       std::uint64_t seed);

/// Everything a batch loss needs besides the parameters.
struct LossContext {
  ModelParams like;  // kind, supports, n_dof, sign
  std::size_t window = 201;
  double nu = 10.0;
  std::size_t batch = 32;
  int threads = 1;
  std::shared_ptr<const TpcfPlan> plan;  // window x window, h_max, bandwidth
  std::vector<double> data_curves;       // 6 x (h_max + 1), kPhasePairs order

  static LossContext make(const ModelParams& like, const TrainConfig& config, const TpcfSet* data);
  void set_data(const TpcfSet& data);
};

struct BatchResult {
  double loss = 0;
  std::vector<double> grad;           // d loss / d raw
  std::vector<double> member_values;  // per-member loss terms
  std::vector<double> scores;         // per-member discriminator scores (adversarial losses)
};

/// Seed of batch member `member` for a loss evaluation identified by `tag`.
std::uint64_t member_seed(std::uint64_t seed, std::uint64_t tag, std::size_t member);

BatchResult loss_tpcf(const LossContext& ctx, const std::vector<double>& raw, std::uint64_t seed);
BatchResult loss_generator_adv(const LossContext& ctx, const std::vector<double>& raw, const DiscriminatorParams& disc,
                               std::uint64_t seed);
BatchResult loss_combined(const LossContext& ctx, const std::vector<double>& raw, const DiscriminatorParams& disc,
                          double gamma_w, std::uint64_t seed);

struct DiscBatchResult {
  double loss = 0;
  std::vector<double> grad;  // d loss / d discriminator parameters
  std::vector<double> real_scores, fake_scores;
};

/// Discriminator loss on the given cutouts and on `cutouts.size()` soft model
/// realizations drawn with `seed`.
DiscBatchResult loss_discriminator(const DiscriminatorParams& disc, const LossContext& ctx,
                                   const std::vector<double>& raw, const std::vector<PhaseImage>& cutouts,
                                   std::uint64_t seed, DiscLossVariant variant = DiscLossVariant::Pseudocode);

/// Discriminator loss from given scores.
double disc_loss_from_scores(const std::vector<double>& real, const std::vector<double>& fake, DiscLossVariant variant);

/// Target descriptors of the early-stopping metric.
struct DataSummary2D {
  std::array<double, 3> volume_fraction{};
  std::array<double, 3> specific_surface{};  // per voxel
};
DataSummary2D summarize_slices(const std::vector<PhaseImage>& slices);

/// Sum of absolute deviations of Monte Carlo means of volume fractions and 2-D surface
/// densities (per voxel) from the data, over mc_count hard realizations.
double early_stop_metric(const ModelParams& theta, const DataSummary2D& data, std::size_t window, std::size_t mc_count,
                         std::uint64_t seed);

/// Patience rule: the best metric is tracked over all epochs; stopping is allowed only
/// after min_epochs, once patience epochs have passed without strict improvement.
struct EarlyStopper {
  std::size_t min_epochs = 100;
  std::size_t patience = 500;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;

  /// Records the metric of `epoch` (1-based); returns true iff training should stop.
  bool update(std::size_t epoch, double metric);
  bool improved_at(std::size_t epoch) const { return best_epoch == epoch; }
};

struct LogRow {
  std::size_t epoch = 0;  // 0 = pretraining
  std::size_t step = 0;
  double loss = std::numeric_limits<double>::quiet_NaN();
  double loss_d = std::numeric_limits<double>::quiet_NaN();
  double metric = std::numeric_limits<double>::quiet_NaN();
};

/// Complete resumable state of a training run.
struct TrainState {
  Algorithm algorithm = Algorithm::Tpcf;
  std::vector<double> raw;
  AdamState adam;
  DiscriminatorParams disc;
  AdamState adam_d;
  std::size_t epoch = 0;  // completed epochs
  bool pretrained = false;
  EarlyStopper stopper;
  std::vector<double> best_raw;
  std::vector<LogRow> log;
  std::size_t generator_steps = 0;
  std::size_t discriminator_steps = 0;
  std::size_t discriminator_updates = 0;
  std::size_t pretrain_generator_steps = 0;
  std::size_t pretrain_discriminator_steps = 0;
  bool stopped = false;
};

struct TrainHooks {
  /// Replaces the early-stopping metric (epoch, raw) -> value.
  std::function<double(std::size_t, const std::vector<double>&)> metric;
  /// Called after every completed epoch; returning false interrupts the run.
  std::function<bool(const TrainState&)> on_epoch;
  /// Directory to write a checkpoint into after every epoch (empty: none).
  std::string checkpoint_dir;
};

struct TrainResult {
  ModelParams theta;
  TrainState state;
};

/// Raw parameters drawn from N(0,1) (the unconstrained space).
std::vector<double> initial_raw(const ModelParams& like, std::uint64_t seed);

TrainResult train_tpcf(const ModelParams& like, const TpcfSet& data, const TrainConfig& config,
                       const TrainHooks& hooks = {}, const TrainState* resume = nullptr);
TrainResult train_gan(const ModelParams& like, const std::vector<PhaseImage>& slices, const TrainConfig& config,
                      const TrainHooks& hooks = {}, const TrainState* resume = nullptr);
TrainResult train_combined(const ModelParams& like, const std::vector<PhaseImage>& slices, const TpcfSet& data,
                           const TrainConfig& config, const TrainHooks& hooks = {}, const TrainState* resume = nullptr);

/// Checkpoint directory: params.json, state.json, discriminator.bin, log.csv.
void save_checkpoint(const std::string& dir, const ModelParams& like, const TrainState& state,
                     const TrainConfig& config);
TrainState load_checkpoint(const std::string& dir, const ModelParams& like);
void write_log_csv(const std::string& path, const std::vector<LogRow>& log);

}  // namespace exset
