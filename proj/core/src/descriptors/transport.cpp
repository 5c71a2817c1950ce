#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <string>

#include "exset/descriptors.hpp"
#include "exset/error.hpp"

namespace exset {

namespace {

constexpr double kFar = 1e30;

struct Grid3 {
  std::array<long long, 3> n{1, 1, 1};
  std::size_t size() const { return static_cast<std::size_t>(n[0] * n[1] * n[2]); }
  std::size_t index(long long x, long long y, long long z) const {
    return static_cast<std::size_t>(x + n[0] * (y + n[1] * z));
  }
  std::array<long long, 3> coords(std::size_t i) const {
    const long long v = static_cast<long long>(i);
    return {v % n[0], (v / n[0]) % n[1], v / (n[0] * n[1])};
  }
  bool inside(long long x, long long y, long long z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < n[0] && y < n[1] && z < n[2];
  }
};

Grid3 grid_of(const std::vector<std::size_t>& extents) {
  if (extents.empty() || extents.size() > 3) fail_contract("image must have 1-3 axes");
  Grid3 g;
  for (std::size_t d = 0; d < extents.size(); ++d) g.n[d] = static_cast<long long>(extents[d]);
  return g;
}

// Exact 1-D squared distance transform (lower envelope of parabolas).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<std::size_t>& v,
            std::vector<double>& z) {
  const std::size_t n = f.size();
  auto meet = [&](std::size_t q, std::size_t p) {
    const double qq = static_cast<double>(q), pp = static_cast<double>(p);
    return ((f[q] + qq * qq) - (f[p] + pp * pp)) / (2 * qq - 2 * pp);
  };
  std::size_t k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (std::size_t q = 1; q < n; ++q) {
    double s = meet(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = meet(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const double dq = static_cast<double>(q) - static_cast<double>(v[k]);
    d[q] = dq * dq + f[v[k]];
  }
}

std::vector<bool> phase_mask(const PhaseImage& img, int phase) {
  if (phase < 1 || phase > 3) fail_contract("phase must be 1, 2 or 3, got " + std::to_string(phase));
  if (img.labels.size() != numel(img.extents)) fail_contract("image: label count does not match extents");
  std::vector<bool> m(img.labels.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = img.labels[i] == phase;
  return m;
}

void check_axis(const PhaseImage& img, int axis) {
  if (axis < 0 || static_cast<std::size_t>(axis) >= img.dim())
    fail_contract("axis " + std::to_string(axis) + " not present in the image");
}

const std::vector<std::array<long long, 3>>& neighbours26() {
  static const auto offsets = [] {
    std::vector<std::array<long long, 3>> o;
    for (long long dz = -1; dz <= 1; ++dz)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dx = -1; dx <= 1; ++dx)
          if (dx || dy || dz) o.push_back({dx, dy, dz});
    return o;
  }();
  return offsets;
}

// Voxels of `mask` connected (26-neighbourhood) to the face axis = 0.
std::vector<bool> connected_to_start(const Grid3& g, const std::vector<bool>& mask, int axis) {
  std::vector<bool> seen(mask.size(), false);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && g.coords(i)[axis] == 0) {
      seen[i] = true;
      queue.push_back(i);
    }
  while (!queue.empty()) {
    const auto c = g.coords(queue.front());
    queue.pop_front();
    for (const auto& o : neighbours26()) {
      const long long x = c[0] + o[0], y = c[1] + o[1], z = c[2] + o[2];
      if (!g.inside(x, y, z)) continue;
      const std::size_t j = g.index(x, y, z);
      if (mask[j] && !seen[j]) {
        seen[j] = true;
        queue.push_back(j);
      }
    }
  }
  return seen;
}

bool percolates(const Grid3& g, const std::vector<bool>& mask, int axis) {
  const auto reach = connected_to_start(g, mask, axis);
  for (std::size_t i = 0; i < reach.size(); ++i)
    if (reach[i] && g.coords(i)[axis] == g.n[axis] - 1) return true;
  return false;
}

// Fraction of the phase covered by open balls of radius r centred in `centres`.
double covered_fraction(const std::vector<std::size_t>& extents, const std::vector<bool>& centres,
                        const std::vector<bool>& mask, double phase_voxels, double r) {
  const auto d2 = squared_distance_transform(extents, centres);
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) n += mask[i] && d2[i] < r * r;
  return static_cast<double>(n) / phase_voxels;
}

// Radius at which a non-increasing tabulated fraction crosses 1/2 (linear
// interpolation; the fraction is taken as 1 at r = 0).
double half_crossing(const std::vector<double>& r, const std::vector<double>& v) {
  double r0 = 0, v0 = 1;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (v[k] < 0.5) return r0 + (v0 - 0.5) / (v0 - v[k]) * (r[k] - r0);
    r0 = r[k];
    v0 = v[k];
  }
  return r0;
}

}  // namespace

std::vector<double> squared_distance_transform(const std::vector<std::size_t>& extents, const std::vector<bool>& site) {
  const Grid3 g = grid_of(extents);
  if (site.size() != g.size()) fail_contract("distance transform: mask size mismatch");
  std::vector<double> out(site.size());
  for (std::size_t i = 0; i < site.size(); ++i) out[i] = site[i] ? 0.0 : kFar;
  for (int axis = 0; axis < 3; ++axis) {
    const long long n = g.n[axis];
    if (n == 1) continue;
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<std::size_t> v(n);
    std::array<long long, 3> c{};
    for (c[a2] = 0; c[a2] < g.n[a2]; ++c[a2])
      for (c[a1] = 0; c[a1] < g.n[a1]; ++c[a1]) {
        for (c[axis] = 0; c[axis] < n; ++c[axis]) f[c[axis]] = out[g.index(c[0], c[1], c[2])];
        edt_1d(f, d, v, z);
        for (c[axis] = 0; c[axis] < n; ++c[axis]) out[g.index(c[0], c[1], c[2])] = d[c[axis]];
      }
  }
  for (auto& x : out)
    if (x >= kFar / 2) x = std::numeric_limits<double>::infinity();
  return out;
}

double geodesic_tortuosity(const PhaseImage& img, int phase, int axis) {
  check_axis(img, axis);
  const auto mask = phase_mask(img, phase);
  const Grid3 g = grid_of(img.extents);
  const long long n_axis = g.n[axis];
  std::vector<double> dist(mask.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && g.coords(i)[axis] == n_axis - 1) {
      dist[i] = 0;
      heap.emplace(0.0, i);
    }
  static const double step[4] = {0.0, 1.0, std::sqrt(2.0), std::sqrt(3.0)};
  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (d > dist[i]) continue;
    const auto c = g.coords(i);
    for (const auto& o : neighbours26()) {
      const long long x = c[0] + o[0], y = c[1] + o[1], z = c[2] + o[2];
      if (!g.inside(x, y, z)) continue;
      const std::size_t j = g.index(x, y, z);
      if (!mask[j]) continue;
      const double nd = d + step[std::abs(o[0]) + std::abs(o[1]) + std::abs(o[2])];
      if (nd < dist[j]) {
        dist[j] = nd;
        heap.emplace(nd, j);
      }
    }
  }
  double total = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && g.coords(i)[axis] == 0 && std::isfinite(dist[i])) {
      // path between the two face planes: voxel steps plus the two half voxels at the ends
      total += (dist[i] + 1.0) / static_cast<double>(n_axis);
      ++count;
    }
  if (count == 0)
    throw NonPercolationError("tortuosity: phase " + std::to_string(phase) + " does not connect the faces along axis " +
                              std::to_string(axis));
  return total / static_cast<double>(count);
}

ConstrictivityResult constrictivity_detail(const PhaseImage& img, int phase, int axis) {
  check_axis(img, axis);
  const auto mask = phase_mask(img, phase);
  const Grid3 g = grid_of(img.extents);
  if (!percolates(g, mask, axis))
    throw NonPercolationError("constrictivity: phase " + std::to_string(phase) +
                              " does not connect the faces along axis " + std::to_string(axis));
  std::vector<bool> background(mask.size());
  double phase_voxels = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    background[i] = !mask[i];
    phase_voxels += mask[i];
  }
  const auto d2 = squared_distance_transform(img.extents, background);
  double dmax = 0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) dmax = std::max(dmax, d2[i]);
  if (!std::isfinite(dmax)) return {1.0, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  dmax = std::sqrt(dmax);

  std::vector<double> radii, psd, intrusion;
  for (double r = 0.5;; r += 0.5) {
    std::vector<bool> eroded(mask.size());
    bool any = false;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      eroded[i] = mask[i] && d2[i] >= r * r;
      any = any || eroded[i];
    }
    radii.push_back(r);
    if (!any) {
      psd.push_back(0);
      intrusion.push_back(0);
      break;
    }
    psd.push_back(covered_fraction(img.extents, eroded, mask, phase_voxels, r));
    intrusion.push_back(covered_fraction(img.extents, connected_to_start(g, eroded, axis), mask, phase_voxels, r));
    if (r > dmax + 1) break;
  }
  ConstrictivityResult res;
  res.r_max = half_crossing(radii, psd);
  res.r_min = half_crossing(radii, intrusion);
  res.beta = res.r_max > 0 ? std::min(1.0, (res.r_min / res.r_max) * (res.r_min / res.r_max)) : 0.0;
  return res;
}

double constrictivity(const PhaseImage& img, int phase, int axis) { return constrictivity_detail(img, phase, axis).beta; }

DescriptorSummary describe(const PhaseImage& img, double voxel_size, int axis, bool transport) {
  DescriptorSummary s;
  const auto vf = volume_fractions(img);
  for (int p = 1; p <= 3; ++p) {
    auto& ps = s.phases[p - 1];
    ps.volume_fraction = vf[p - 1];
    std::size_t n = 0, total = 0;
    for (std::size_t a = 0; a < img.dim(); ++a) {
      try {
        const auto c = chord_lengths(img, p, static_cast<int>(a), voxel_size);
        n += c.lengths.size();
        for (auto l : c.lengths) total += l;
      } catch (const EmptyDistributionError&) {
      }
    }
    if (n > 0) ps.mean_chord = static_cast<double>(total) / static_cast<double>(n) * voxel_size;
    ps.specific_surface =
        img.dim() == 2 ? specific_surface_2d(img, p, voxel_size) : img.dim() == 3 ? specific_surface_3d(img, p, voxel_size) : 0.0;
    if (transport && img.dim() == 3 && vf[p - 1] > 0) {
      try {
        ps.constrictivity = constrictivity(img, p, axis);
        ps.tortuosity = geodesic_tortuosity(img, p, axis);
      } catch (const NonPercolationError&) {
        ps.constrictivity.reset();
        ps.tortuosity.reset();
      }
    }
  }
  return s;
}

}  // namespace exset
