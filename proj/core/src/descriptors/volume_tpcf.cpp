#include <cmath>
#include <map>
#include <string>

#include "exset/descriptors.hpp"
#include "exset/error.hpp"
#include "fft.hpp"

namespace exset {

namespace {

std::size_t good_size(std::size_t n) {
  for (;; ++n) {
    std::size_t m = n;
    for (std::size_t p : {2, 3, 5, 7})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
  }
}

void check_phase(int phase) {
  if (phase < 1 || phase > 3) fail_contract("phase must be 1, 2 or 3, got " + std::to_string(phase));
}

// Zero-padded copy of a window array on the plan's padded grid.
std::vector<double> pad(const TpcfPlan& plan, std::span<const double> a) {
  const Strides3 sw(plan.window()), sp(plan.padded());
  std::vector<double> out(numel(plan.padded()), 0.0);
  for (std::size_t i = 0; i < sw.extent[0]; ++i)
    for (std::size_t j = 0; j < sw.extent[1]; ++j)
      for (std::size_t k = 0; k < sw.extent[2]; ++k) out[sp.index(i, j, k)] = a[sw.index(i, j, k)];
  return out;
}

std::vector<double> unpad(const TpcfPlan& plan, const std::vector<double>& a) {
  const Strides3 sw(plan.window()), sp(plan.padded());
  std::vector<double> out(numel(plan.window()));
  for (std::size_t i = 0; i < sw.extent[0]; ++i)
    for (std::size_t j = 0; j < sw.extent[1]; ++j)
      for (std::size_t k = 0; k < sw.extent[2]; ++k) out[sw.index(i, j, k)] = a[sp.index(i, j, k)];
  return out;
}

// Correlation sums R(t) = sum_s a(s) b(s+t) on the padded grid.
std::vector<double> correlate(const TpcfPlan& plan, const std::vector<fft::Complex>& A,
                              const std::vector<fft::Complex>& B) {
  std::vector<fft::Complex> p(A.size());
  for (std::size_t q = 0; q < p.size(); ++q) p[q] = std::conj(A[q]) * B[q];
  return fft::inverse(plan.padded(), p);
}

void check_image(const PhaseImage& img) {
  if (img.labels.size() != numel(img.extents)) fail_contract("image: label count does not match extents");
}

}  // namespace

std::array<double, 3> volume_fractions(const PhaseImage& img) {
  std::array<std::size_t, 3> n{0, 0, 0};
  for (auto l : img.labels) {
    if (l < 1 || l > 3) throw DataError("image: label outside {1,2,3}");
    ++n[l - 1];
  }
  const double total = static_cast<double>(img.labels.size());
  return {n[0] / total, n[1] / total, n[2] / total};
}

TpcfPlan::TpcfPlan(const Shape& window, std::size_t h_max, double b) : window_(window), h_max_(h_max) {
  if (window.empty() || window.size() > 3) fail_contract("tpcf: window must have 1-3 axes");
  if (!(b > 0)) fail_contract("tpcf: bandwidth must be positive");
  for (auto n : window)
    if (h_max + 1 > n) fail_contract("tpcf: h_max must be below every window extent");
  const std::size_t rank = window.size();
  padded_.resize(rank);
  for (std::size_t d = 0; d < rank; ++d) padded_[d] = good_size(window[d] + h_max);

  const Strides3 sp(padded_);
  const std::size_t off = 3 - rank;
  std::array<long long, 3> m{0, 0, 0};
  for (std::size_t d = 0; d < rank; ++d) m[off + d] = static_cast<long long>(h_max);
  std::array<long long, 3> ext{1, 1, 1};
  for (std::size_t d = 0; d < rank; ++d) ext[off + d] = static_cast<long long>(window[d]);
  const long long hm2 = static_cast<long long>(h_max * h_max);

  std::map<long long, std::size_t> groups;
  std::vector<long long> lag_r2;
  for (long long a = -m[0]; a <= m[0]; ++a)
    for (long long c = -m[1]; c <= m[1]; ++c)
      for (long long e = -m[2]; e <= m[2]; ++e) {
        const long long r2 = a * a + c * c + e * e;
        if (r2 > hm2) continue;
        const double cnt = static_cast<double>((ext[0] - std::abs(a)) * (ext[1] - std::abs(c)) * (ext[2] - std::abs(e)));
        auto wrap = [&](long long v, std::size_t axis) {
          const long long P = static_cast<long long>(sp.extent[axis]);
          return static_cast<std::size_t>((v % P + P) % P);
        };
        lag_index_.push_back(sp.index(wrap(a, 0), wrap(c, 1), wrap(e, 2)));
        inv_count_.push_back(1.0 / cnt);
        lag_r2.push_back(r2);
        groups.emplace(r2, 0);
      }
  for (auto& [r2, g] : groups) {
    g = group_radius_.size();
    group_radius_.push_back(std::sqrt(static_cast<double>(r2)));
  }
  std::vector<double> group_size(group_radius_.size(), 0.0);
  lag_group_.resize(lag_r2.size());
  for (std::size_t l = 0; l < lag_r2.size(); ++l) {
    lag_group_[l] = groups[lag_r2[l]];
    group_size[lag_group_[l]] += 1.0;
  }
  const std::size_t G = group_radius_.size();
  regress_.assign(h_count() * G, 0.0);
  for (std::size_t h = 0; h <= h_max_; ++h) {
    double denom = 0;
    for (std::size_t g = 0; g < G; ++g) {
      const double u = (static_cast<double>(h) - group_radius_[g]) / b;
      regress_[h * G + g] = std::exp(-0.5 * u * u);
      denom += regress_[h * G + g] * group_size[g];
    }
    for (std::size_t g = 0; g < G; ++g) regress_[h * G + g] /= denom;
  }
}

namespace graph {

ad::Tensor tpcf_curves(std::shared_ptr<const TpcfPlan> plan_ptr, const std::array<ad::Tensor, 3>& channels) {
  const TpcfPlan& plan = *plan_ptr;
  for (const auto& c : channels)
    if (c.shape() != plan.window()) fail_contract("tpcf: channel shape does not match the plan window");
  auto spectra = std::make_shared<std::array<std::vector<fft::Complex>, 3>>();
  for (int c = 0; c < 3; ++c) {
    const auto padded = pad(plan, channels[c].values());
    (*spectra)[c] = fft::forward(plan.padded(), padded.data());
  }
  const std::size_t H = plan.h_count(), G = plan.group_count();
  std::vector<double> out(6 * H, 0.0);
  std::vector<double> S(G);
  for (std::size_t p = 0; p < 6; ++p) {
    const auto [i, j] = kPhasePairs[p];
    const auto R = correlate(plan, (*spectra)[i - 1], (*spectra)[j - 1]);
    std::fill(S.begin(), S.end(), 0.0);
    for (std::size_t l = 0; l < plan.lag_count(); ++l)
      S[plan.lag_group()[l]] += R[plan.lag_index()[l]] * plan.lag_count_weight()[l];
    for (std::size_t h = 0; h < H; ++h) {
      double v = 0;
      for (std::size_t g = 0; g < G; ++g) v += plan.weight(h, g) * S[g];
      out[p * H + h] = v;
    }
  }
  std::vector<ad::Tensor> inputs(channels.begin(), channels.end());
  return ad::detail::make_result(Shape{6, H}, std::move(out), inputs, [plan_ptr, spectra, H, G](const ad::Node& self) {
    const TpcfPlan& plan = *plan_ptr;
    const std::size_t Q = (*spectra)[0].size();
    std::array<std::vector<fft::Complex>, 3> D;
    for (auto& d : D) d.assign(Q, fft::Complex(0.0, 0.0));
    std::vector<double> gS(G), gl(numel(plan.padded()));
    for (std::size_t p = 0; p < 6; ++p) {
      const auto [i, j] = kPhasePairs[p];
      for (std::size_t g = 0; g < G; ++g) {
        double v = 0;
        for (std::size_t h = 0; h < H; ++h) v += plan.weight(h, g) * self.grad[p * H + h];
        gS[g] = v;
      }
      std::fill(gl.begin(), gl.end(), 0.0);
      for (std::size_t l = 0; l < plan.lag_count(); ++l)
        gl[plan.lag_index()[l]] += gS[plan.lag_group()[l]] * plan.lag_count_weight()[l];
      const auto Gs = fft::forward(plan.padded(), gl.data());
      const auto& A = (*spectra)[i - 1];
      const auto& B = (*spectra)[j - 1];
      for (std::size_t q = 0; q < Q; ++q) {
        D[i - 1][q] += std::conj(Gs[q]) * B[q];
        D[j - 1][q] += Gs[q] * A[q];
      }
    }
    for (int c = 0; c < 3; ++c) {
      double* g = ad::detail::grad_of(self.inputs[c]);
      if (!g) continue;
      const auto full = unpad(plan, fft::inverse(plan.padded(), D[c]));
      for (std::size_t x = 0; x < full.size(); ++x) g[x] += full[x];
    }
  });
}

}  // namespace graph

TpcfRaw tpcf_raw(const PhaseImage& img, int i, int j, std::size_t max_lag) {
  check_phase(i);
  check_phase(j);
  check_image(img);
  const Shape shape = shape_from_extents(img.extents);
  for (auto e : shape)
    if (max_lag + 1 > e) fail_contract("tpcf_raw: max_lag must be below every extent");
  const TpcfPlan plan(shape, max_lag);
  const auto a = pad(plan, img.indicator(i));
  const auto b = pad(plan, img.indicator(j));
  const auto R = correlate(plan, fft::forward(plan.padded(), a.data()), fft::forward(plan.padded(), b.data()));

  TpcfRaw raw;
  const std::size_t rank = shape.size();
  const long long m = static_cast<long long>(max_lag), hm2 = m * m;
  std::array<long long, 3> ext{1, 1, 1};
  for (std::size_t d = 0; d < rank; ++d) ext[3 - rank + d] = static_cast<long long>(shape[d]);
  std::array<long long, 3> lim{0, 0, 0};
  for (std::size_t d = 0; d < rank; ++d) lim[3 - rank + d] = m;
  std::size_t l = 0;
  // Same enumeration order as the plan; counts are integers, so round the FFT sums.
  for (long long a0 = -lim[0]; a0 <= lim[0]; ++a0)
    for (long long a1 = -lim[1]; a1 <= lim[1]; ++a1)
      for (long long a2 = -lim[2]; a2 <= lim[2]; ++a2) {
        const long long r2 = a0 * a0 + a1 * a1 + a2 * a2;
        if (r2 > hm2) continue;
        const double cnt = static_cast<double>((ext[0] - std::abs(a0)) * (ext[1] - std::abs(a1)) * (ext[2] - std::abs(a2)));
        const double sum = std::round(R[plan.lag_index()[l]]);
        raw.lag.push_back({a2, a1, a0});  // x, y, z
        raw.radius.push_back(std::sqrt(static_cast<double>(r2)));
        raw.value.push_back(sum / cnt);
        raw.count.push_back(cnt);
        ++l;
      }
  return raw;
}

std::vector<double> tpcf_kernel_regress(const TpcfRaw& raw, const std::vector<double>& h_grid, double b) {
  if (raw.radius.empty()) throw DataError("tpcf regression: no raw estimates");
  if (!(b > 0)) fail_contract("tpcf regression: bandwidth must be positive");
  std::vector<double> out(h_grid.size());
  for (std::size_t k = 0; k < h_grid.size(); ++k) {
    double num = 0, den = 0;
    for (std::size_t l = 0; l < raw.radius.size(); ++l) {
      const double u = (h_grid[k] - raw.radius[l]) / b;
      const double w = std::exp(-0.5 * u * u);
      num += w * raw.value[l];
      den += w;
    }
    out[k] = num / den;
  }
  return out;
}

TpcfSet tpcf(const PhaseImage& img, std::size_t h_max, double b) {
  check_image(img);
  const auto plan = std::make_shared<const TpcfPlan>(shape_from_extents(img.extents), h_max, b);
  const Shape shape = plan->window();
  std::array<ad::Tensor, 3> ch;
  for (int c = 0; c < 3; ++c) ch[c] = ad::Tensor::constant(shape, img.indicator(c + 1));
  const auto curves = graph::tpcf_curves(plan, ch);
  TpcfSet set;
  for (std::size_t h = 0; h <= h_max; ++h) set.h_grid.push_back(static_cast<double>(h));
  for (std::size_t p = 0; p < 6; ++p)
    set.values[p].assign(curves.values().begin() + static_cast<std::ptrdiff_t>(p * plan->h_count()),
                         curves.values().begin() + static_cast<std::ptrdiff_t>((p + 1) * plan->h_count()));
  return set;
}

TpcfSet tpcf_data_average(const std::vector<PhaseImage>& images, std::size_t h_max, double b) {
  if (images.empty()) fail_contract("tpcf average: no images");
  TpcfSet acc;
  for (std::size_t k = 0; k < images.size(); ++k) {
    if (images[k].extents != images[0].extents) fail_contract("tpcf average: images differ in extents");
    const auto s = tpcf(images[k], h_max, b);
    if (k == 0) {
      acc = s;
      continue;
    }
    for (std::size_t p = 0; p < 6; ++p)
      for (std::size_t h = 0; h < s.values[p].size(); ++h) acc.values[p][h] += s.values[p][h];
  }
  const double n = static_cast<double>(images.size());
  for (auto& v : acc.values)
    for (auto& x : v) x /= n;
  return acc;
}

}  // namespace exset
