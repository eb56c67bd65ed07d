#include "ppspec/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace ppspec {

void fft_radix2(std::complex<double>* data, std::size_t n, int sign) {
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_radix2: length must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

void fft_2d(std::vector<std::complex<double>>& data, std::size_t n0,
            std::size_t n1, int sign) {
    if (data.size() != n0 * n1) throw std::invalid_argument("fft_2d: size mismatch");
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < static_cast<long long>(n0); ++r) {
        fft_radix2(data.data() + static_cast<std::size_t>(r) * n1, n1, sign);
    }
    std::vector<std::complex<double>> col(n0 * n1);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(n1); ++c) {
        std::vector<std::complex<double>> tmp(n0);
        for (std::size_t r = 0; r < n0; ++r) tmp[r] = data[r * n1 + c];
        fft_radix2(tmp.data(), n0, sign);
        for (std::size_t r = 0; r < n0; ++r) col[r * n1 + c] = tmp[r];
    }
    data.swap(col);
}

}  // namespace ppspec
