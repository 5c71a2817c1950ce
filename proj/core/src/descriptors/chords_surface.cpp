#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "exset/descriptors.hpp"
#include "exset/error.hpp"

namespace exset {

namespace {

struct Axes {
  std::array<std::size_t, 3> n{1, 1, 1};
  std::array<std::size_t, 3> stride{1, 1, 1};
};

Axes axes_of(const PhaseImage& img) {
  if (img.labels.size() != numel(img.extents)) fail_contract("image: label count does not match extents");
  Axes a;
  for (std::size_t d = 0; d < img.extents.size() && d < 3; ++d) a.n[d] = img.extents[d];
  a.stride = {1, a.n[0], a.n[0] * a.n[1]};
  return a;
}

void check_phase(int phase) {
  if (phase < 1 || phase > 3) fail_contract("phase must be 1, 2 or 3, got " + std::to_string(phase));
}

// Transitions between `phase` and the rest along offset (dx, dy, dz), and the number
// of voxel pairs with that offset inside the window.
std::pair<double, double> transitions(const PhaseImage& img, const Axes& a, int phase, long long dx, long long dy,
                                      long long dz) {
  std::size_t hits = 0, pairs = 0;
  const long long nx = static_cast<long long>(a.n[0]), ny = static_cast<long long>(a.n[1]),
                  nz = static_cast<long long>(a.n[2]);
  for (long long z = std::max(0LL, -dz); z < nz - std::max(0LL, dz); ++z)
    for (long long y = std::max(0LL, -dy); y < ny - std::max(0LL, dy); ++y)
      for (long long x = std::max(0LL, -dx); x < nx - std::max(0LL, dx); ++x) {
        const std::size_t i = static_cast<std::size_t>(x + nx * (y + ny * z));
        const std::size_t j = static_cast<std::size_t>((x + dx) + nx * ((y + dy) + ny * (z + dz)));
        hits += (img.labels[i] == phase) != (img.labels[j] == phase);
        ++pairs;
      }
  return {static_cast<double>(hits), static_cast<double>(pairs)};
}

}  // namespace

double ChordCdf::operator()(double t) const {
  if (values.empty()) throw EmptyDistributionError("chord CDF: empty distribution");
  if (t <= 0) return values[0];
  const double T = support();
  if (t >= T) return 1.0;
  const auto k = static_cast<std::size_t>(t);
  const double f = t - static_cast<double>(k);
  return values[k] + f * (values[k + 1] - values[k]);
}

double ChordLengthDistribution::mean_voxels() const {
  if (lengths.empty()) throw EmptyDistributionError("chord lengths: empty distribution");
  const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  return total / static_cast<double>(lengths.size());
}

ChordCdf ChordLengthDistribution::cdf() const {
  if (lengths.empty()) throw EmptyDistributionError("chord lengths: empty distribution");
  ChordCdf c;
  const std::size_t T = lengths.back();
  c.values.assign(T + 1, 0.0);
  const double n = static_cast<double>(lengths.size());
  std::size_t idx = 0;
  for (std::size_t t = 0; t <= T; ++t) {
    while (idx < lengths.size() && lengths[idx] <= t) ++idx;
    c.values[t] = static_cast<double>(idx) / n;
  }
  return c;
}

ChordLengthDistribution chord_lengths(const PhaseImage& img, int phase, int axis, double voxel_size) {
  check_phase(phase);
  if (axis < 0 || static_cast<std::size_t>(axis) >= img.dim())
    fail_contract("chord lengths: axis " + std::to_string(axis) + " not present in a " + std::to_string(img.dim()) +
                  "-D image");
  const Axes a = axes_of(img);
  const std::size_t len = a.n[axis], step = a.stride[axis];
  const int o1 = (axis + 1) % 3, o2 = (axis + 2) % 3;
  ChordLengthDistribution out;
  out.phase = phase;
  out.axis = axis;
  out.voxel_size = voxel_size;
  for (std::size_t u = 0; u < a.n[o1]; ++u)
    for (std::size_t v = 0; v < a.n[o2]; ++v) {
      const std::size_t base = u * a.stride[o1] + v * a.stride[o2];
      std::size_t k = 0;
      while (k < len) {
        if (img.labels[base + k * step] != phase) {
          ++k;
          continue;
        }
        const std::size_t start = k;
        while (k < len && img.labels[base + k * step] == phase) ++k;
        if (start > 0 && k < len) out.lengths.push_back(k - start);
      }
    }
  if (out.lengths.empty())
    throw EmptyDistributionError("chord lengths: no uncensored chords of phase " + std::to_string(phase));
  std::sort(out.lengths.begin(), out.lengths.end());
  return out;
}

double specific_surface_2d(const PhaseImage& img, int phase, double voxel_size) {
  check_phase(phase);
  if (img.dim() != 2) fail_contract("specific_surface_2d: image must be 2-D");
  const Axes a = axes_of(img);
  // Crofton estimate from intersection counts along the 0, 45, 90 and 135 degree
  // lattice directions, equally weighted.
  const std::array<std::array<long long, 2>, 4> dirs{{{1, 0}, {0, 1}, {1, 1}, {1, -1}}};
  double pl = 0;
  for (const auto& d : dirs) {
    const auto [hits, pairs] = transitions(img, a, phase, d[0], d[1], 0);
    if (pairs > 0) pl += 0.25 * hits / (pairs * std::hypot(double(d[0]), double(d[1])));
  }
  const double la = std::numbers::pi / 2 * pl;
  return 4 / std::numbers::pi * la / voxel_size;
}

double specific_surface_3d(const PhaseImage& img, int phase, double voxel_size) {
  check_phase(phase);
  if (img.dim() != 3) fail_contract("specific_surface_3d: image must be 3-D");
  const Axes a = axes_of(img);
  // Crofton estimate over the 13 lattice directions of the 2x2x2 neighbourhood,
  // weighted by the solid angles of their Voronoi cells on the sphere.
  constexpr double g1 = 0.04577775, g2 = 0.03698078;
  constexpr double g3 = (1.0 - 6 * g1 - 12 * g2) / 8;
  double pl = 0;
  for (long long dz = -1; dz <= 1; ++dz)
    for (long long dy = -1; dy <= 1; ++dy)
      for (long long dx = -1; dx <= 1; ++dx) {
        // one representative per undirected direction
        const bool positive = dz > 0 || (dz == 0 && (dy > 0 || (dy == 0 && dx > 0)));
        if (!positive) continue;
        const int order = static_cast<int>(std::abs(dx) + std::abs(dy) + std::abs(dz));
        const double w = 2 * (order == 1 ? g1 : order == 2 ? g2 : g3);
        const auto [hits, pairs] = transitions(img, a, phase, dx, dy, dz);
        if (pairs > 0) pl += w * hits / (pairs * std::sqrt(static_cast<double>(order)));
      }
  return 2 * pl / voxel_size;
}

}  // namespace exset
