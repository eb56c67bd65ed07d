#pragma once

#include "ppspec/geometry.hpp"

namespace ppspec {

// Product triangular kernel W(x) = prod_j 2 max(1 - 2|x_j|, 0), support
// [-1/2,1/2]^d, unit mass; W_b(x) = b^{-d} W(x/b).
struct SmoothingKernel {
    double bandwidth;

    explicit SmoothingKernel(double b);
    double weight(std::span<const double> offset) const;
};

// Mean-squared-error rate rule b = |D_n|^{-1/6}.
double default_bandwidth(const Window& window);

// Normalized-weight Riemann smoother
//   sum_k W_b(w - w_k) I(w_k) / sum_k W_b(w - w_k);
// requires grid spacing 2 pi / Omega < b so every kernel window sees a point.
double ksde(const PeriodogramField& field, const SmoothingKernel& kernel,
            std::span<const double> omega);

// KSDE at every grid frequency of the field; OpenMP-parallel.
std::vector<double> ksde_on_grid(const PeriodogramField& field, const SmoothingKernel& kernel);

}  // namespace ppspec
