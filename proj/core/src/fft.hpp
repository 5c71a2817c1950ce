#pragma once

#include <complex>
#include <vector>

#include "exset/grid.hpp"

namespace exset::fft {

using Complex = std::complex<double>;

/// Number of complex coefficients of a real-to-complex transform of `shape`
/// (last extent halved plus one).
std::size_t spectrum_size(const Shape& shape);

/// Unnormalized forward transform of a row-major real array.
std::vector<Complex> forward(const Shape& shape, const double* in);

/// Unnormalized inverse transform; the result is divided by numel(shape).
std::vector<double> inverse(const Shape& shape, const std::vector<Complex>& spectrum);

/// Weight of each half-spectrum coefficient in a full-spectrum sum (1 or 2).
/// Used for inner products of spectra: sum_full(a conj b) = sum_half(w a conj b).
std::vector<double> hermitian_weights(const Shape& shape);

}  // namespace exset::fft
