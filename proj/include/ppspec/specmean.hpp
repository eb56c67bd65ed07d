#pragma once

#include <functional>
#include <vector>

#include "ppspec/geometry.hpp"
#include "ppspec/models.hpp"

namespace ppspec {

// phi evaluated at a frequency, writing n_out components. Scalar functionals
// use n_out = 1; the Whittle variance path passes the p-vector grad f^{-1}.
struct SpectralFunctional {
    int n_out = 1;
    std::function<void(std::span<const double> omega, std::span<double> out)> eval;

    static SpectralFunctional constant(double value);
    static SpectralFunctional scalar(std::function<double(std::span<const double>)> f);
};

// Riemann A(phi) = (2pi/Omega)^d sum_k phi(w_k) f(w_k); the true-model side.
std::vector<double> spectral_mean_true(const SpectralModel& model,
                                       const SpectralFunctional& phi,
                                       const FrequencyGrid& grid);

// Riemann integrated periodogram (2pi/Omega)^d sum_k phi(w_k) I(w_k).
std::vector<double> spectral_mean_estimate(const PeriodogramField& field,
                                           const SpectralFunctional& phi);

}  // namespace ppspec
