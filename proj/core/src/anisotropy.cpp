#include "exset/anisotropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "exset/error.hpp"

namespace exset {

namespace {

void check_cdfs(const PhaseCdfs& c, const char* which) {
  for (int i = 0; i < 3; ++i)
    if (c[i].values.empty())
      throw EmptyDistributionError(std::string("scale fit: empty ") + which + " distribution for phase " +
                                   std::to_string(i + 1));
}

}  // namespace

ChordCdf average_cdf(const ChordCdf& a, const ChordCdf& b) {
  if (a.values.empty() || b.values.empty()) throw EmptyDistributionError("chord CDF: empty distribution");
  const std::size_t n = std::max(a.values.size(), b.values.size());
  ChordCdf out;
  out.values.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double x = static_cast<double>(t);
    out.values[t] = 0.5 * (a(x) + b(x));
  }
  return out;
}

double common_support(const PhaseCdfs& phi_xy, const PhaseCdfs& phi_z) {
  double t = 0;
  for (int i = 0; i < 3; ++i) t = std::max({t, phi_xy[i].support(), phi_z[i].support()});
  return t;
}

double scale_objective(const PhaseCdfs& phi_xy, const PhaseCdfs& phi_z, double s, double t_max, double dt) {
  if (!(dt > 0)) fail_contract("scale objective: dt must be positive");
  if (!(s > 0)) fail_contract("scale objective: s must be positive");
  check_cdfs(phi_xy, "in-plane");
  check_cdfs(phi_z, "z");
  const auto n = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
  auto f = [&](double t) {
    double v = 0;
    for (int i = 0; i < 3; ++i) v += std::abs(phi_xy[i](t) - phi_z[i](t * s));
    return v;
  };
  double acc = 0, prev = f(0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double cur = f(static_cast<double>(k) * dt);
    acc += 0.5 * (prev + cur) * dt;
    prev = cur;
  }
  return acc;
}

ScaleFit fit_scale_factor(const PhaseCdfs& phi_xy, const PhaseCdfs& phi_z, const ScaleSearch& search) {
  if (!(search.lo > 0) || !(search.hi > search.lo)) fail_contract("scale fit: need 0 < lo < hi");
  if (!(search.grid_step > 0) || !(search.tolerance > 0)) fail_contract("scale fit: steps must be positive");
  check_cdfs(phi_xy, "in-plane");
  check_cdfs(phi_z, "z");
  const double t_max = common_support(phi_xy, phi_z);
  ScaleFit fit;
  auto eval = [&](double s) {
    const double v = scale_objective(phi_xy, phi_z, s, t_max, search.dt);
    fit.trace.emplace_back(s, v);
    return v;
  };

  const auto points = static_cast<std::size_t>(std::floor((search.hi - search.lo) / search.grid_step + 1e-9)) + 1;
  double best_s = search.lo, best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < points; ++k) {
    const double s = search.lo + static_cast<double>(k) * search.grid_step;
    const double v = eval(s);
    if (v < best) {
      best = v;
      best_s = s;
    }
  }

  double a = std::max(search.lo, best_s - search.grid_step), b = std::min(search.hi, best_s + search.grid_step);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > search.tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = eval(d);
    }
  }
  const double s_ref = 0.5 * (a + b);
  const double v_ref = eval(s_ref);
  if (v_ref <= best) {
    fit.s_hat = s_ref;
    fit.objective = v_ref;
  } else {
    fit.s_hat = best_s;
    fit.objective = best;
  }
  return fit;
}

DirectionalCdfs directional_chord_cdfs(const PhaseImage& volume) {
  if (volume.dim() != 3) throw DataError("scale fit: volume must be 3-D");
  DirectionalCdfs out;
  for (int i = 0; i < 3; ++i) {
    const auto cx = chord_lengths(volume, i + 1, 0).cdf();
    const auto cy = chord_lengths(volume, i + 1, 1).cdf();
    out.xy[i] = average_cdf(cx, cy);
    out.z[i] = chord_lengths(volume, i + 1, 2).cdf();
  }
  return out;
}

ScaleFit fit_scale_factor(const PhaseImage& volume, const ScaleSearch& search) {
  const auto c = directional_chord_cdfs(volume);
  return fit_scale_factor(c.xy, c.z, search);
}

}  // namespace exset
