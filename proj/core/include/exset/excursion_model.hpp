#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "exset/autodiff/tensor.hpp"
#include "exset/random_fields.hpp"

namespace exset {

enum class ModelKind { HighParametric, LowParametric };

/// Field order used throughout: X, Y, X~, Y~, Z~.
inline constexpr std::size_t kFieldCount = 5;

/// Parameters of the three-phase excursion-set model.
struct ModelParams {
  ModelKind kind = ModelKind::LowParametric;
  /// Radial kernel specs (high-parametric), each of support `support`.
  std::array<RadialKernelSpec, kFieldCount> radial{};
  /// Covariance parameters (low-parametric).
  std::array<ParametricCovariance, kFieldCount> lowparam{};
  /// Support radius L of the high-parametric kernels.
  std::size_t support = 100;
  /// Kernel halfwidth used when inverting the low-parametric covariances.
  std::size_t lowparam_halfwidth = 12;
  double gamma = 0.5;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double lambda_x = 2.0;
  double lambda_y = 2.0;
  int n_dof = 2;
  int sign = 1;
  double voxel_size_um = 1.0;
  /// z-scaling of the anisotropic variant, when fitted.
  std::optional<double> s_hat;

  void validate() const;
  std::size_t kernel_halfwidth() const {
    return kind == ModelKind::HighParametric ? support : lowparam_halfwidth;
  }
};

/// Number of free parameters: 5L+5 (high-parametric) or 5*13+5 (low-parametric).
std::size_t param_count(ModelKind kind, std::size_t support = 100);

/// Hard three-phase image; labels are 1, 2, 3 (extents x-first, x fastest).
struct PhaseImage {
  std::vector<std::size_t> extents;
  std::vector<std::uint8_t> labels;

  std::size_t dim() const { return extents.size(); }
  std::size_t voxels() const { return labels.size(); }
  /// Indicator values (0/1) of phase i in {1,2,3}.
  std::vector<double> indicator(int phase) const;
};

/// Soft relaxation: three channels in (0,1) summing to one at every voxel.
struct PhaseField {
  std::vector<std::size_t> extents;
  std::array<std::vector<double>, 3> channels;
  double nu = 10.0;
};

/// Hard labels from a soft field: phase 1 where channel 1 exceeds 1/2, otherwise
/// phase 2 where channel 2 exceeds half of the mass left by channel 1, else phase 3.
PhaseImage harden(const PhaseField& field);

PhaseImage realize_hard(const ModelParams& theta, const std::vector<std::size_t>& extents, std::uint64_t seed);
PhaseField realize_soft(const ModelParams& theta, const std::vector<std::size_t>& extents, std::uint64_t seed,
                        double nu = 10.0);
PhaseImage realize_anisotropic(const ModelParams& theta, double s_hat, const std::vector<std::size_t>& extents,
                               std::uint64_t seed);

/// z-extent of the isotropic realization backing an anisotropic one.
std::size_t anisotropic_source_depth(std::size_t nz, double s_hat);

/// Unconstrained parameter vector used by the optimizers, and its inverse map.
/// Layout: five kernel blocks (X, Y, X~, Y~, Z~) followed by gamma, sigma_x,
/// sigma_y, lambda_x, lambda_y. High-parametric blocks hold alpha_1..alpha_L with
/// alpha_0 fixed to 1; low-parametric blocks hold the 13 raw covariance parameters
/// (sigmoid for alpha_1..alpha_3, softplus for the rest). gamma uses a sigmoid,
/// the sigmas a softplus, the thresholds are unconstrained.
std::vector<double> to_raw(const ModelParams& theta);
ModelParams from_raw(const ModelParams& like, const std::vector<double>& raw);

/// Seed of the noise stream feeding field f of copy i (f = 0..4 in field order;
/// X and Y have a single copy).
std::uint64_t noise_stream_seed(std::uint64_t seed, std::size_t field, std::size_t copy);

namespace graph {

/// Kernels and scalars of the model as differentiable functions of the raw vector.
struct ModelTensors {
  std::array<ad::Tensor, kFieldCount> kernels;
  ad::Tensor gamma, sigma_x, sigma_y, lambda_x, lambda_y;
};

ModelTensors model_tensors(const ModelParams& like, const ad::Tensor& raw, std::size_t dim);
/// Same quantities as constants of a given parameter set.
ModelTensors model_constants(const ModelParams& theta, std::size_t dim);

/// Noise tensors (enlarged windows) for one realization, in the order X, Y, then
/// (X~_i, Y~_i, Z~_i) for each copy i.
std::vector<ad::Tensor> model_noise(const ModelParams& theta, const std::vector<std::size_t>& extents,
                                    std::uint64_t seed);

/// Threshold arguments X' + sigma_x X - lambda_x and Y' + sigma_y Y - lambda_y.
struct ThresholdArgs {
  ad::Tensor x, y;
};
ThresholdArgs threshold_args(const ModelTensors& m, const std::vector<ad::Tensor>& noise, int n_dof, int sign);

/// Soft channels from threshold arguments.
std::array<ad::Tensor, 3> soft_channels(const ThresholdArgs& args, double nu);

}  // namespace graph

}  // namespace exset
