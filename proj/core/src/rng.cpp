#include "exset/rng.hpp"

#include <cmath>
#include <numbers>

namespace exset {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53 random bits to a double in [0, 1).
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) * 0x1.0p-53;
}

constexpr std::uint32_t kNormalDomain = 0x4e4f524du;   // "NORM"
constexpr std::uint32_t kUniformDomain = 0x554e4946u;  // "UNIF"

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(seed);
  for (auto t : tags) h = mix64(h ^ mix64(t + 0x632BE59BD9B4E019ull));
  return h;
}

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t index, std::uint32_t domain) const {
  const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(index),
                                         static_cast<std::uint32_t>(index >> 32), domain, 0u};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
  return philox4x32(ctr, key);
}

std::array<double, 2> CounterRng::normal_pair(std::uint64_t blk) const {
  const auto r = block(blk, kNormalDomain);
  const double u1 = 1.0 - to_unit(r[0], r[1]);  // (0, 1]
  const double u2 = to_unit(r[2], r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double CounterRng::uniform(std::uint64_t i) const {
  const auto r = block(i, kUniformDomain);
  return to_unit(r[0], r[1]);
}

std::uint64_t CounterRng::uniform_index(std::uint64_t i, std::uint64_t n) const {
  const auto r = block(i, kUniformDomain);
  const auto k = static_cast<std::uint64_t>(to_unit(r[2], r[3]) * static_cast<double>(n));
  return k < n ? k : n - 1;
}

void CounterRng::fill_normal(std::span<double> out) const {
  const std::size_t n = out.size();
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    const auto z = normal_pair(k / 2);
    out[k] = z[0];
    out[k + 1] = z[1];
  }
  if (n % 2 == 1) out[n - 1] = normal_pair((n - 1) / 2)[0];
}

}  // namespace exset
