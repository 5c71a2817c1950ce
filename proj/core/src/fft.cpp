#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <utility>

#include "exset/error.hpp"

namespace exset::fft {

namespace {

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Plans live for the process lifetime; new-array execution is thread-safe.
const PlanPair& plans_for(const Shape& shape) {
  static std::map<Shape, PlanPair> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(shape);
  if (it != cache.end()) return it->second;
  const int rank = static_cast<int>(shape.size());
  std::vector<int> n(shape.begin(), shape.end());
  const std::size_t real_n = numel(shape);
  const std::size_t cplx_n = spectrum_size(shape);
  double* r = fftw_alloc_real(real_n);
  fftw_complex* c = fftw_alloc_complex(cplx_n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.r2c = fftw_plan_dft_r2c(rank, n.data(), r, c, flags);
  p.c2r = fftw_plan_dft_c2r(rank, n.data(), c, r, flags);
  fftw_free(r);
  fftw_free(c);
  if (!p.r2c || !p.c2r) throw NumericalError("fft: planning failed");
  return cache.emplace(shape, p).first->second;
}

}  // namespace

std::size_t spectrum_size(const Shape& shape) {
  require(!shape.empty(), "fft: empty shape");
  std::size_t n = shape.back() / 2 + 1;
  for (std::size_t i = 0; i + 1 < shape.size(); ++i) n *= shape[i];
  return n;
}

std::vector<Complex> forward(const Shape& shape, const double* in) {
  const auto& p = plans_for(shape);
  // r2c does not modify its input, but the interface takes a non-const pointer.
  std::vector<double> copy(in, in + numel(shape));
  std::vector<Complex> out(spectrum_size(shape));
  fftw_execute_dft_r2c(p.r2c, copy.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> inverse(const Shape& shape, const std::vector<Complex>& spectrum) {
  const auto& p = plans_for(shape);
  std::vector<Complex> work = spectrum;  // c2r destroys its input
  std::vector<double> out(numel(shape));
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(work.data()), out.data());
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<double> hermitian_weights(const Shape& shape) {
  const std::size_t last = shape.back();
  const std::size_t half = last / 2 + 1;
  std::vector<double> w(spectrum_size(shape), 2.0);
  for (std::size_t base = 0; base < w.size(); base += half) {
    w[base] = 1.0;
    if (last % 2 == 0) w[base + half - 1] = 1.0;
  }
  return w;
}

}  // namespace exset::fft
