#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppspec/geometry.hpp"
#include "ppspec/models.hpp"
#include "ppspec/taper.hpp"

namespace ppspec {

struct ParameterBox {
    std::vector<double> lo, hi;
};

struct OptimizerConfig {
    int max_iterations = 4000;
    double x_tol = 1e-7;   // simplex spread in log10-parameter space
    double f_tol = 1e-10;
    int multistarts = 4;
    std::uint64_t seed = 0;
    std::optional<ParameterBox> box;  // family default when absent
};

struct FitResult {
    std::string family;
    std::vector<double> theta;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    double lambda_hat = 0.0;
    double implied_intensity = 0.0;
    double grid_spacing = 0.0;
    double domain_d0 = 0.0, domain_d1 = 0.0;
    std::size_t grid_size = 0;
    bool reduced = false;
};

ParameterBox default_box(SpectralModel::Family family, int dim);

// L_n^{(R)}(theta) = sum_{w_k in D} [ I(w_k)/f_theta(w_k) + log f_theta(w_k) ].
// Infeasible parameters and spectra touching the 1e-12 floor return a large
// steerable sentinel instead of throwing.
double whittle_objective(const PeriodogramField& field, const SpectralModel& model);

// Riemann spectral divergence sum_k [ f(w_k)/f_theta(w_k) + log f_theta(w_k) ]
// against a precomputed true spectrum.
double spectral_divergence(const std::vector<double>& f_true, const SpectralModel& model,
                           const FrequencyGrid& grid);
double spectral_divergence(const SpectralModel& true_model, const SpectralModel& model,
                           const FrequencyGrid& grid);

// Whittle fit on a prespecified annulus; computes the periodogram field once.
FitResult fit(const PointPattern& pattern, SpectralModel::Family family,
              const DomainSpec& domain, const Taper& taper, const SpacingRule& spacing,
              const OptimizerConfig& config = {});

// Fit a precomputed field (also the synthetic-spectrum fixed-point path).
FitResult fit_field(const PeriodogramField& field, SpectralModel::Family family,
                    const OptimizerConfig& config = {});

// Thomas fit under the constraint alpha = lambda_hat / kappa; free parameters
// (kappa, sigma2). The reported implied intensity is lambda_hat itself.
FitResult fit_reduced_tcp(const PointPattern& pattern, const DomainSpec& domain,
                          const Taper& taper, const SpacingRule& spacing,
                          const OptimizerConfig& config = {});
FitResult fit_reduced_tcp_field(const PeriodogramField& field,
                                const OptimizerConfig& config = {});

// Best fitting parameter: minimizer of the spectral divergence between the
// true model and the family on the domain grid.
FitResult best_fit_oracle(const SpectralModel& true_model, SpectralModel::Family family,
                          const DomainSpec& domain, const Window& window,
                          const SpacingRule& spacing, const OptimizerConfig& config = {});

}  // namespace ppspec
