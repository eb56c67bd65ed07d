#pragma once

#include <vector>

#include "ppspec/geometry.hpp"
#include "ppspec/models.hpp"
#include "ppspec/specmean.hpp"
#include "ppspec/taper.hpp"
#include "ppspec/whittle.hpp"

namespace ppspec {

struct SubsampleConfig {
    double block_side = 0.0;   // a_n; default ceil(sqrt(min side)) when 0
    double stride = 1.0;       // block-center lattice spacing
    int min_blocks = 20;

    double resolved_block(const Window& window) const;
};

// Subsampling estimate of lim |D_n| var(A_hat(phi)): overlapping blocks
// B^(k) = k + [-a/2, a/2]^d, block DFTs with the taper re-centered on the
// block and the full-window intensity estimate, empirical (co)variance of the
// block integrated periodograms scaled by the block volume. Returns the p x p
// matrix row-major (p = phi.n_out).
std::vector<double> subsample_variance(const PointPattern& pattern,
                                       const SpectralFunctional& phi,
                                       const DomainSpec& domain, const Taper& taper,
                                       const SpacingRule& spacing,
                                       const SubsampleConfig& config);

struct GammaMatrix {
    std::vector<double> values;  // p x p row-major, symmetric
    double condition = 0.0;
    bool ill_conditioned = false;  // condition > 1e12
};

// Plug-in curvature matrix at theta_hat against a reference spectrum f_ref
// (typically the kernel-smoothed periodogram evaluated on the grid).
GammaMatrix gamma_matrix(const SpectralModel& model, const std::vector<double>& f_ref,
                         const FrequencyGrid& grid);

struct ConfidenceInterval {
    double lower = 0.0, upper = 0.0, variance = 0.0;
};

// Sandwich intervals theta_i -+ z_{1-alpha/2} sqrt(Var_ii) with
// Var = Gamma^{-1} zeta Gamma^{-1} / (4 (2 pi)^{2d} |D_n|), zeta the
// subsampling matrix for phi = grad f_theta^{-1}.
std::vector<ConfidenceInterval> whittle_ci(const FitResult& fit, const PointPattern& pattern,
                                           const Taper& taper, const DomainSpec& domain,
                                           const SpacingRule& spacing,
                                           const SubsampleConfig& config, double alpha);

// Small dense helpers shared with tests.
std::vector<double> invert_spd(const std::vector<double>& m, int p);
std::vector<double> sym_eigenvalues(const std::vector<double>& m, int p);
double normal_quantile(double prob);

}  // namespace ppspec
