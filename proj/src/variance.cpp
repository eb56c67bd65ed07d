#include "ppspec/variance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ppspec/dft.hpp"
#include "ppspec/smoothing.hpp"

namespace ppspec {

double SubsampleConfig::resolved_block(const Window& window) const {
    if (block_side > 0.0) return block_side;
    double min_side = window.side(0);
    for (int i = 1; i < window.dim(); ++i) min_side = std::min(min_side, window.side(i));
    return std::ceil(std::sqrt(min_side));
}

namespace {

std::vector<std::vector<double>> block_centers(const Window& window, double a, double stride) {
    const int d = window.dim();
    std::vector<double> axis_max(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        const double reach = 0.5 * (window.side(i) - a);
        if (reach < 0.0) return {};
        axis_max[static_cast<std::size_t>(i)] = std::floor(reach / stride + 1e-9);
    }
    std::vector<std::vector<double>> centers;
    std::vector<long long> m(static_cast<std::size_t>(d));
    auto emit = [&](auto&& self, int axis) -> void {
        if (axis == d) {
            std::vector<double> c(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i) c[static_cast<std::size_t>(i)] =
                stride * static_cast<double>(m[static_cast<std::size_t>(i)]);
            centers.push_back(std::move(c));
            return;
        }
        const long long mm = static_cast<long long>(axis_max[static_cast<std::size_t>(axis)]);
        for (long long v = -mm; v <= mm; ++v) {
            m[static_cast<std::size_t>(axis)] = v;
            self(self, axis + 1);
        }
    };
    emit(emit, 0);
    return centers;
}

}  // namespace

std::vector<double> subsample_variance(const PointPattern& pattern,
                                       const SpectralFunctional& phi,
                                       const DomainSpec& domain, const Taper& taper,
                                       const SpacingRule& spacing,
                                       const SubsampleConfig& config) {
    const int d = pattern.dim();
    const Window& window = pattern.window();
    const double a = config.resolved_block(window);
    for (int i = 0; i < d; ++i) {
        if (!(a < window.side(i)))
            throw std::invalid_argument("block side must be smaller than the window");
    }
    const auto centers = block_centers(window, a, config.stride);
    if (static_cast<int>(centers.size()) < config.min_blocks)
        throw std::invalid_argument("window too small for subsampling");

    const double lambda_hat = intensity_hat(pattern, taper);
    const Window block_window = Window::cube(d, a);
    const FrequencyGrid grid = build_grid(window, domain, spacing);
    const std::size_t p = static_cast<std::size_t>(phi.n_out);
    const std::size_t n_blocks = centers.size();
    std::vector<double> block_means(n_blocks * p, 0.0);

    // Shifting the block to the origin leaves |J - lambda c| unchanged (the
    // common phase exp(-i k.w) has unit modulus), so each block reduces to an
    // ordinary feasible periodogram on the block window centered with the
    // full-window intensity estimate.
#pragma omp parallel for schedule(dynamic)
    for (long long b = 0; b < static_cast<long long>(n_blocks); ++b) {
        const auto& center = centers[static_cast<std::size_t>(b)];
        std::vector<double> shifted;
        for (std::size_t i = 0; i < pattern.size(); ++i) {
            const double* x = pattern.point(i);
            bool inside = true;
            double y[3];
            for (int j = 0; j < d; ++j) {
                y[j] = x[j] - center[static_cast<std::size_t>(j)];
                if (std::abs(y[j]) > 0.5 * a) inside = false;
            }
            if (inside) shifted.insert(shifted.end(), y, y + d);
        }
        const PointPattern block_pattern(block_window, std::move(shifted));
        const PeriodogramField block_field =
            periodogram_grid(block_pattern, taper, grid, lambda_hat);
        const auto mean = spectral_mean_estimate(block_field, phi);
        for (std::size_t c = 0; c < p; ++c)
            block_means[static_cast<std::size_t>(b) * p + c] = mean[c];
    }

    std::vector<double> grand(p, 0.0);
    for (std::size_t b = 0; b < n_blocks; ++b)
        for (std::size_t c = 0; c < p; ++c) grand[c] += block_means[b * p + c];
    for (double& g : grand) g /= static_cast<double>(n_blocks);

    double block_volume = 1.0;
    for (int i = 0; i < d; ++i) block_volume *= a;
    std::vector<double> zeta(p * p, 0.0);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        for (std::size_t r = 0; r < p; ++r) {
            const double dr = block_means[b * p + r] - grand[r];
            for (std::size_t c = 0; c < p; ++c) {
                const double dc = block_means[b * p + c] - grand[c];
                zeta[r * p + c] += dr * dc;
            }
        }
    }
    for (double& z : zeta) z *= block_volume / static_cast<double>(n_blocks);
    return zeta;
}

GammaMatrix gamma_matrix(const SpectralModel& model, const std::vector<double>& f_ref,
                         const FrequencyGrid& grid) {
    if (f_ref.size() != grid.size())
        throw std::invalid_argument("reference spectrum size does not match grid");
    const int p = model.n_params();
    const std::size_t pp = static_cast<std::size_t>(p);
    const int d = grid.dim();
    std::vector<double> acc(pp * pp, 0.0), grad(pp), hess(pp * pp);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::span<const double> w(grid.frequency(i), static_cast<std::size_t>(d));
        double w2 = 0.0;
        for (double wi : w) w2 += wi * wi;
        const double radial = std::sqrt(w2);
        const double f = model.spectral_density_radial(radial);
        model.spectral_gradient_radial(radial, grad);
        model.spectral_hessian_radial(radial, hess);
        const double diff = f_ref[i] - f;
        for (std::size_t r = 0; r < pp; ++r) {
            for (std::size_t c = 0; c < pp; ++c) {
                // Hessian of 1/f: -H/f^2 + 2 g g^T / f^3
                const double inv_hess =
                    -hess[r * pp + c] / (f * f) + 2.0 * grad[r] * grad[c] / (f * f * f);
                acc[r * pp + c] +=
                    diff * inv_hess + grad[r] * grad[c] / (f * f);
            }
        }
    }
    double scale = grid.cell_measure() / 2.0;
    for (int i = 0; i < d; ++i) scale /= 2.0 * M_PI;
    for (double& v : acc) v *= scale;
    // enforce exact symmetry against accumulation round-off
    for (std::size_t r = 0; r < pp; ++r) {
        for (std::size_t c = r + 1; c < pp; ++c) {
            const double s = 0.5 * (acc[r * pp + c] + acc[c * pp + r]);
            acc[r * pp + c] = acc[c * pp + r] = s;
        }
    }
    GammaMatrix out;
    out.values = std::move(acc);
    const auto eig = sym_eigenvalues(out.values, p);
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (double e : eig) {
        mx = std::max(mx, std::abs(e));
        mn = std::min(mn, std::abs(e));
    }
    out.condition = mn > 0.0 ? mx / mn : std::numeric_limits<double>::infinity();
    out.ill_conditioned = !(out.condition <= 1e12);
    return out;
}

std::vector<double> invert_spd(const std::vector<double>& m, int p) {
    const std::size_t pp = static_cast<std::size_t>(p);
    std::vector<double> a(m);
    std::vector<double> inv(pp * pp, 0.0);
    for (std::size_t i = 0; i < pp; ++i) inv[i * pp + i] = 1.0;
    for (std::size_t col = 0; col < pp; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < pp; ++r)
            if (std::abs(a[r * pp + col]) > std::abs(a[pivot * pp + col])) pivot = r;
        if (std::abs(a[pivot * pp + col]) < 1e-300)
            throw std::runtime_error("singular matrix");
        if (pivot != col) {
            for (std::size_t c = 0; c < pp; ++c) {
                std::swap(a[pivot * pp + c], a[col * pp + c]);
                std::swap(inv[pivot * pp + c], inv[col * pp + c]);
            }
        }
        const double diag = a[col * pp + col];
        for (std::size_t c = 0; c < pp; ++c) {
            a[col * pp + c] /= diag;
            inv[col * pp + c] /= diag;
        }
        for (std::size_t r = 0; r < pp; ++r) {
            if (r == col) continue;
            const double factor = a[r * pp + col];
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < pp; ++c) {
                a[r * pp + c] -= factor * a[col * pp + c];
                inv[r * pp + c] -= factor * inv[col * pp + c];
            }
        }
    }
    return inv;
}

std::vector<double> sym_eigenvalues(const std::vector<double>& m, int p) {
    const std::size_t pp = static_cast<std::size_t>(p);
    std::vector<double> a(m);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t r = 0; r < pp; ++r)
            for (std::size_t c = r + 1; c < pp; ++c) off += a[r * pp + c] * a[r * pp + c];
        if (off < 1e-30) break;
        for (std::size_t r = 0; r < pp; ++r) {
            for (std::size_t c = r + 1; c < pp; ++c) {
                const double arc = a[r * pp + c];
                if (std::abs(arc) < 1e-300) continue;
                const double theta = 0.5 * std::atan2(2.0 * arc, a[c * pp + c] - a[r * pp + r]);
                const double s = std::sin(theta), co = std::cos(theta);
                for (std::size_t k = 0; k < pp; ++k) {
                    const double arr = a[r * pp + k], acc2 = a[c * pp + k];
                    a[r * pp + k] = co * arr - s * acc2;
                    a[c * pp + k] = s * arr + co * acc2;
                }
                for (std::size_t k = 0; k < pp; ++k) {
                    const double arr = a[k * pp + r], acc2 = a[k * pp + c];
                    a[k * pp + r] = co * arr - s * acc2;
                    a[k * pp + c] = s * arr + co * acc2;
                }
            }
        }
    }
    std::vector<double> eig(pp);
    for (std::size_t i = 0; i < pp; ++i) eig[i] = a[i * pp + i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0))
        throw std::invalid_argument("normal quantile requires probability in (0,1)");
    // Acklam's rational approximation, |rel err| < 1.2e-9.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00, 2.938163982698783e+00};
    static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double q, r;
    if (prob < plow) {
        q = std::sqrt(-2.0 * std::log(prob));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    if (prob > phigh) {
        q = std::sqrt(-2.0 * std::log(1.0 - prob));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    q = prob - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

std::vector<ConfidenceInterval> whittle_ci(const FitResult& fit, const PointPattern& pattern,
                                           const Taper& taper, const DomainSpec& domain,
                                           const SpacingRule& spacing,
                                           const SubsampleConfig& config, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("confidence level alpha must lie in (0,1)");
    if (fit.reduced)
        throw std::invalid_argument(
            "confidence intervals are not provided for the constrained fit");
    const int d = pattern.dim();
    SpectralModel::Family family;
    if (fit.family == "poisson") family = SpectralModel::Family::Poisson;
    else if (fit.family == "thomas") family = SpectralModel::Family::Thomas;
    else if (fit.family == "matern") family = SpectralModel::Family::Matern;
    else if (fit.family == "gdpp") family = SpectralModel::Family::Gdpp;
    else if (fit.family == "hawkes") family = SpectralModel::Family::HawkesExp;
    else throw std::invalid_argument("confidence intervals need a closed-form family");
    const SpectralModel model(family, d, fit.theta);
    const int p = model.n_params();
    const std::size_t pp = static_cast<std::size_t>(p);

    const FrequencyGrid grid = build_grid(pattern.window(), domain, spacing);
    const PeriodogramField field = periodogram_grid(pattern, taper, grid);
    const SmoothingKernel kernel(default_bandwidth(pattern.window()));
    const std::vector<double> f_hat = ksde_on_grid(field, kernel);

    const GammaMatrix gamma = gamma_matrix(model, f_hat, grid);
    if (gamma.ill_conditioned) throw std::runtime_error("singular curvature matrix");
    const auto gamma_inv = invert_spd(gamma.values, p);

    SpectralFunctional phi;
    phi.n_out = p;
    phi.eval = [&model, pp](std::span<const double> w, std::span<double> out) {
        double w2 = 0.0;
        for (double wi : w) w2 += wi * wi;
        const double radial = std::sqrt(w2);
        const double f = model.spectral_density_radial(radial);
        model.spectral_gradient_radial(radial, out);
        for (std::size_t j = 0; j < pp; ++j) out[j] = -out[j] / (f * f);
    };
    const auto zeta = subsample_variance(pattern, phi, domain, taper, spacing, config);

    // Var(theta_hat) = Gamma^{-1} zeta Gamma^{-1} / (4 (2 pi)^{2d} |D_n|)
    std::vector<double> tmp(pp * pp, 0.0), var(pp * pp, 0.0);
    for (std::size_t r = 0; r < pp; ++r)
        for (std::size_t c = 0; c < pp; ++c)
            for (std::size_t k = 0; k < pp; ++k)
                tmp[r * pp + c] += gamma_inv[r * pp + k] * zeta[k * pp + c];
    for (std::size_t r = 0; r < pp; ++r)
        for (std::size_t c = 0; c < pp; ++c)
            for (std::size_t k = 0; k < pp; ++k)
                var[r * pp + c] += tmp[r * pp + k] * gamma_inv[k * pp + c];
    double denom = 4.0 * pattern.window().volume();
    for (int i = 0; i < 2 * d; ++i) denom *= 2.0 * M_PI;
    for (double& v : var) v /= denom;

    const double z = normal_quantile(1.0 - 0.5 * alpha);
    std::vector<ConfidenceInterval> out(pp);
    for (std::size_t i = 0; i < pp; ++i) {
        const double v = var[i * pp + i];
        if (!(v >= 0.0)) throw std::runtime_error("inconsistent variance estimate");
        out[i].variance = v;
        out[i].lower = fit.theta[i] - z * std::sqrt(v);
        out[i].upper = fit.theta[i] + z * std::sqrt(v);
    }
    return out;
}

}  // namespace ppspec
