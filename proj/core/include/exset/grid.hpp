#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace exset {

/// Row-major shape: the last entry varies fastest in memory.
using Shape = std::vector<std::size_t>;

inline std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

/// Image extents are listed x-first (x varies fastest); tensors use row-major
/// shapes, so an image with extents (nx, ny, nz) is a tensor of shape (nz, ny, nx).
inline Shape shape_from_extents(const std::vector<std::size_t>& extents) {
  return Shape(extents.rbegin(), extents.rend());
}

inline std::vector<std::size_t> extents_from_shape(const Shape& shape) {
  return std::vector<std::size_t>(shape.rbegin(), shape.rend());
}

/// Row-major strides for up to three dimensions (padded with leading ones).
struct Strides3 {
  std::array<std::size_t, 3> extent{1, 1, 1};
  std::array<std::size_t, 3> stride{0, 0, 1};

  explicit Strides3(const Shape& shape) {
    const std::size_t off = 3 - shape.size();
    for (std::size_t i = 0; i < shape.size(); ++i) extent[off + i] = shape[i];
    stride[2] = 1;
    stride[1] = extent[2];
    stride[0] = extent[1] * extent[2];
  }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i * stride[0] + j * stride[1] + k;
  }
};

/// Round half away from zero (the nearest-integer convention used for radial kernels
/// and the anisotropic index map).
inline long long round_half_away(double x) { return std::llround(x); }

}  // namespace exset
