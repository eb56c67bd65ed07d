#pragma once

#include <complex>
#include <vector>

namespace ppspec {

// In-place radix-2 complex FFT, n a power of two; sign = -1 forward, +1 inverse
// (inverse is unnormalized).
void fft_radix2(std::complex<double>* data, std::size_t n, int sign);

// Row-column transform of an n0 x n1 row-major array, both dims powers of two.
void fft_2d(std::vector<std::complex<double>>& data, std::size_t n0,
            std::size_t n1, int sign);

}  // namespace ppspec
