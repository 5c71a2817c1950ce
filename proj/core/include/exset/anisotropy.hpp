#pragma once

#include <array>
#include <utility>
#include <vector>

#include "exset/descriptors.hpp"

namespace exset {

struct ScaleSearch {
  double lo = 0.5;
  double hi = 2.0;
  double grid_step = 0.005;
  double tolerance = 1e-4;  // final bracket width of the golden-section refinement
  double dt = 0.1;          // trapezoid step in voxels
};

struct ScaleFit {
  double s_hat = 1.0;
  double objective = 0.0;
  std::vector<std::pair<double, double>> trace;  // (s, objective) in evaluation order
};

using PhaseCdfs = std::array<ChordCdf, 3>;

/// Pointwise mean of two CDFs.
ChordCdf average_cdf(const ChordCdf& a, const ChordCdf& b);

/// Largest support over all given CDFs.
double common_support(const PhaseCdfs& phi_xy, const PhaseCdfs& phi_z);

/// Trapezoid approximation of the integral over [0, t_max] of
/// sum_i |phi_xy_i(t) - phi_z_i(t s)|.
double scale_objective(const PhaseCdfs& phi_xy, const PhaseCdfs& phi_z, double s, double t_max, double dt = 0.1);

/// Grid search over [lo, hi] followed by golden-section refinement around the best
/// grid point.
ScaleFit fit_scale_factor(const PhaseCdfs& phi_xy, const PhaseCdfs& phi_z, const ScaleSearch& search = {});

/// In-plane (mean of x and y) and z chord-length CDFs of all phases of a 3-D image.
struct DirectionalCdfs {
  PhaseCdfs xy, z;
};
DirectionalCdfs directional_chord_cdfs(const PhaseImage& volume);

ScaleFit fit_scale_factor(const PhaseImage& volume, const ScaleSearch& search = {});

}  // namespace exset
