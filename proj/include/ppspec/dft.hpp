#pragma once

#include <array>
#include <complex>
#include <optional>

#include "ppspec/geometry.hpp"
#include "ppspec/taper.hpp"

namespace ppspec {

// Raw and feasible-centered transforms at one frequency.
struct DftResult {
    std::array<double, 3> omega{0.0, 0.0, 0.0};
    std::complex<double> raw;       // J_{h,n}(w)
    std::complex<double> centered;  // J_{h,n}(w) - lambda_hat c_{h,n}(w)
    double lambda_hat = 0.0;
};

// Tapered DFT J_{h,n}(w) = (2 pi)^{-d/2} H_{h,2}^{-1/2} |D_n|^{-1/2}
//   sum_x h(x/A) exp(-i x.w); the pattern's canonical point order makes the
// sum bit-stable.
std::complex<double> dft(const PointPattern& pattern, const Taper& taper,
                         std::span<const double> omega);

DftResult dft_result(const PointPattern& pattern, const Taper& taper,
                     std::span<const double> omega);

// Unbiased intensity estimator H_{h,1}^{-1} |D_n|^{-1} sum_x h(x/A); equals
// count/|D_n| for the uniform taper.
double intensity_hat(const PointPattern& pattern, const Taper& taper);

// Feasible centered DFT J - lambda_hat c_{h,n}.
std::complex<double> dft_centered(const PointPattern& pattern, const Taper& taper,
                                  std::span<const double> omega);

// Infeasible centering with a supplied (true) intensity; oracle comparisons only.
std::complex<double> dft_centered_with_lambda(const PointPattern& pattern, const Taper& taper,
                                              std::span<const double> omega, double lambda);

double periodogram(const PointPattern& pattern, const Taper& taper,
                   std::span<const double> omega);

// Grid periodogram via the separable factor-matrix product; evaluates the
// rectangular hull of the grid and keeps the annulus points. OpenMP-parallel
// over output rows; results are independent of the thread count.
// lambda_override centers with a supplied intensity (subsample blocks center
// with the full-window estimate).
// max_block_points caps the factor-matrix footprint; the blocked product is
// bit-identical to the unblocked one.
PeriodogramField periodogram_grid(const PointPattern& pattern, const Taper& taper,
                                  const FrequencyGrid& grid,
                                  std::optional<double> lambda_override = {},
                                  std::size_t max_block_points = 16384);

namespace reference {

// Serial pointwise evaluation, kept as the oracle for the fast path.
PeriodogramField periodogram_grid_pointwise(const PointPattern& pattern, const Taper& taper,
                                            const FrequencyGrid& grid);

}  // namespace reference

}  // namespace ppspec
