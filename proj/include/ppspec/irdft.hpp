#pragma once

#include <complex>
#include <cstdint>
#include <functional>

#include "ppspec/geometry.hpp"
#include "ppspec/taper.hpp"

namespace ppspec {

// Known first-order intensity in rescaled coordinates: lambda_1(x) =
// lambda_bar(x/A) for x in the window, strictly positive.
struct IntensityField {
    std::function<double(std::span<const double>)> lambda_bar;
    double lambda_min = 0.0;

    static IntensityField constant(double lambda);
};

// Intensity-reweighted DFT: each point is weighted by h(x/A)/lambda_bar(x/A).
std::complex<double> ir_dft(const PointPattern& pattern, const Taper& taper,
                            const IntensityField& intensity, std::span<const double> omega);

// |IR-DFT - c_{h,n}|^2; the centering is deterministic because the IR-DFT has
// mean c_{h,n} regardless of the process.
double ir_periodogram(const PointPattern& pattern, const Taper& taper,
                      const IntensityField& intensity, std::span<const double> omega);

// Pseudo-spectral density (2 pi)^{-d} H_{h^2/lambda,1} / H_{h,2} +
// invF(ell2)(w) for an absolutely integrable radial ell2.
double ir_psd(const std::function<double(double)>& ell2_radial, const Taper& taper,
              const IntensityField& intensity, int dim, std::span<const double> omega);

// int_{[-1/2,1/2]^d} h(x)^2 / lambda_bar(x) dx by nested adaptive quadrature.
double taper_sq_over_intensity_moment(const Taper& taper, const IntensityField& intensity,
                                      int dim);

// Thinning simulator for an inhomogeneous Poisson process with the given
// rescaled intensity; acceptance-test companion of the IR pipeline.
PointPattern simulate_inhomogeneous_poisson(const IntensityField& intensity,
                                            const Window& window, std::uint64_t seed);

}  // namespace ppspec
