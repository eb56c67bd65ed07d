#pragma once

#include <span>
#include <string>
#include <vector>

#include "ppspec/geometry.hpp"

namespace ppspec {

// Parametric spectral families. All members are isotropic, so the radial
// overloads taking |w| are the primitive ones. Canonical parameter order:
//   poisson    (lambda)
//   thomas     (kappa, alpha, sigma2)      lambda = kappa alpha
//   matern     (kappa, alpha, r)           lambda = kappa alpha
//   gdpp       (lambda, rho2)              existence: pi rho2 lambda^{2/d} <= 1
//   hawkes_exp (nu, a, beta), d = 1        lambda = nu / (1 - a/beta)
//   lgcp_exp   (mu, s2, phi)               lambda = exp(mu + s2/2)
class SpectralModel {
public:
    enum class Family { Poisson, Thomas, Matern, Gdpp, HawkesExp, LgcpExp };

    SpectralModel(Family family, int dim, std::vector<double> params);
    // e.g. "thomas:kappa=0.2,alpha=10,sigma2=0.25"
    static SpectralModel parse(int dim, const std::string& text);

    Family family() const { return family_; }
    int dim() const { return dim_; }
    int n_params() const { return static_cast<int>(params_.size()); }
    const std::vector<double>& params() const { return params_; }
    std::vector<std::string> param_names() const { return param_names_for(family_); }
    static std::vector<std::string> param_names_for(Family family);
    static std::string family_to_name(Family family);
    std::string family_name() const { return family_to_name(family_); }
    SpectralModel with_params(std::span<const double> params) const;

    double intensity() const;
    bool has_closed_form_spectrum() const { return family_ != Family::LgcpExp; }

    // f_theta at radial frequency w = |omega|_2; strictly positive.
    double spectral_density_radial(double w) const;
    double spectral_density(std::span<const double> omega) const;

    // g(r) - 1 for the isotropic families poisson/thomas/gdpp/lgcp.
    double pcf_minus_one(double r) const;

    // d f / d theta (analytic); errors for lgcp_exp.
    void spectral_gradient_radial(double w, std::span<double> out) const;
    std::vector<double> spectral_gradient(std::span<const double> omega) const;

    // d^2 f / d theta^2, row-major p x p (analytic); errors for lgcp_exp.
    void spectral_hessian_radial(double w, std::span<double> out) const;
    std::vector<double> spectral_hessian(std::span<const double> omega) const;

    // True whenever theta violates the family constraints; used by the
    // optimizer to reject infeasible proposals instead of constructing.
    static bool feasible(Family family, int dim, std::span<const double> params);

private:
    void validate() const;

    Family family_;
    int dim_;
    std::vector<double> params_;
};

// Evaluate f on every grid frequency, memoizing on the squared integer radius
// (cheap for closed forms, essential for the quadrature-backed LGCP spectrum).
std::vector<double> spectral_density_on_grid(const SpectralModel& model,
                                             const FrequencyGrid& grid);

}  // namespace ppspec
