#pragma once

#include <array>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "exset/autodiff/tensor.hpp"
#include "exset/excursion_model.hpp"

namespace exset {

/// The six unordered phase pairs in output order.
inline constexpr std::array<std::pair<int, int>, 6> kPhasePairs{
    {{1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}};

std::array<double, 3> volume_fractions(const PhaseImage& img);

/// Per-lag estimates c_ij(t) with their lag vectors, norms and edge counts c(t).
struct TpcfRaw {
  std::vector<std::array<long long, 3>> lag;  // x, y, z components (unused ones 0)
  std::vector<double> radius;
  std::vector<double> value;
  std::vector<double> count;
};

struct TpcfSet {
  std::vector<double> h_grid;
  std::array<std::vector<double>, 6> values;  // in kPhasePairs order
};

/// Exact two-point estimates for all lags with |t| <= max_lag.
TpcfRaw tpcf_raw(const PhaseImage& img, int i, int j, std::size_t max_lag);

/// Nadaraya-Watson smoothing of raw estimates with an unnormalized Gaussian kernel.
std::vector<double> tpcf_kernel_regress(const TpcfRaw& raw, const std::vector<double>& h_grid, double b = 0.5);

/// Smoothed curves of all six pairs on h = 0..h_max.
TpcfSet tpcf(const PhaseImage& img, std::size_t h_max, double b = 0.5);
/// Pointwise mean of per-image curves.
TpcfSet tpcf_data_average(const std::vector<PhaseImage>& images, std::size_t h_max, double b = 0.5);

/// Precomputed lag bookkeeping for the smoothed estimator on a fixed window.
class TpcfPlan {
 public:
  /// window is a row-major tensor shape (1-3 axes).
  TpcfPlan(const Shape& window, std::size_t h_max, double b = 0.5);

  const Shape& window() const { return window_; }
  const Shape& padded() const { return padded_; }
  std::size_t h_count() const { return h_max_ + 1; }
  std::size_t h_max() const { return h_max_; }
  std::size_t lag_count() const { return lag_index_.size(); }

  /// Padded-grid index, edge count and radius group of each lag.
  const std::vector<std::size_t>& lag_index() const { return lag_index_; }
  const std::vector<double>& lag_count_weight() const { return inv_count_; }
  const std::vector<std::size_t>& lag_group() const { return lag_group_; }
  std::size_t group_count() const { return group_radius_.size(); }
  /// Regression weight of group g at h: curve(h) = sum_g A(h,g) * sum_{lags in g} c(t).
  double weight(std::size_t h, std::size_t g) const { return regress_[h * group_radius_.size() + g]; }

 private:
  Shape window_, padded_;
  std::size_t h_max_;
  std::vector<std::size_t> lag_index_;
  std::vector<double> inv_count_;
  std::vector<std::size_t> lag_group_;
  std::vector<double> group_radius_;
  std::vector<double> regress_;
};

namespace graph {

/// Smoothed two-point curves of three channel tensors (shape = plan window);
/// output shape (6, h_count) in kPhasePairs order. Differentiable in the channels.
ad::Tensor tpcf_curves(std::shared_ptr<const TpcfPlan> plan, const std::array<ad::Tensor, 3>& channels);

}  // namespace graph

/// Tabulated chord-length CDF at integer lengths 0..T (in voxels); linear in between
/// and 1 beyond T.
struct ChordCdf {
  std::vector<double> values;
  double operator()(double t) const;
  double support() const { return values.empty() ? 0.0 : static_cast<double>(values.size() - 1); }
};

struct ChordLengthDistribution {
  int phase = 1;
  int axis = 0;  // 0 = x, 1 = y, 2 = z
  std::vector<std::size_t> lengths;  // sorted, voxels
  double voxel_size = 1.0;
  double mean_voxels() const;
  double mean() const { return mean_voxels() * voxel_size; }
  ChordCdf cdf() const;
};

/// Maximal runs of `phase` along `axis`; runs touching the window boundary are discarded.
ChordLengthDistribution chord_lengths(const PhaseImage& img, int phase, int axis, double voxel_size = 1.0);

/// (4/pi) times the boundary length per area of a 2-D phase.
double specific_surface_2d(const PhaseImage& img, int phase, double voxel_size = 1.0);
/// Boundary area per volume of a 3-D phase.
double specific_surface_3d(const PhaseImage& img, int phase, double voxel_size = 1.0);

/// Mean geodesic tortuosity of `phase` between the faces perpendicular to `axis`.
double geodesic_tortuosity(const PhaseImage& img, int phase, int axis = 2);

struct ConstrictivityResult {
  double beta = 0;
  double r_min = 0;
  double r_max = 0;
};
ConstrictivityResult constrictivity_detail(const PhaseImage& img, int phase, int axis = 2);
double constrictivity(const PhaseImage& img, int phase, int axis = 2);

/// Squared Euclidean distance of every voxel to the nearest voxel where `site` is true
/// (infinity if there is none).
std::vector<double> squared_distance_transform(const std::vector<std::size_t>& extents, const std::vector<bool>& site);

struct PhaseSummary {
  double volume_fraction = 0;
  std::optional<double> mean_chord;  // physical units, pooled over axes
  double specific_surface = 0;       // 1 / physical length
  std::optional<double> constrictivity;
  std::optional<double> tortuosity;
};

struct DescriptorSummary {
  std::array<PhaseSummary, 3> phases;
};

/// Volume fractions, chords and surface density for all phases; for 3-D images also
/// constrictivity and tortuosity along `axis` where the phase percolates.
DescriptorSummary describe(const PhaseImage& img, double voxel_size = 1.0, int axis = 2,
                           bool transport = true);

}  // namespace exset
