#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace sbrnn::fft {

using cplx = std::complex<double>;

/// In-place unnormalized forward DFT, X[k] = sum_n x[n] exp(-2 pi i k n / N).
void forward(std::span<cplx> data);

/// In-place inverse DFT including the 1/N factor.
void inverse(std::span<cplx> data);

/// Smallest length >= n whose only prime factors are 2, 3, 5 and 7.
std::size_t good_size(std::size_t n);

/// Angular frequency (rad/s) of DFT bin k for length n at sample rate fs,
/// using the signed convention (bins above n/2 are negative).
double bin_omega(std::size_t k, std::size_t n, double fs);

}  // namespace sbrnn::fft
