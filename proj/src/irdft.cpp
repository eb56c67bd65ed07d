#include "ppspec/irdft.hpp"

#include <cmath>
#include <stdexcept>

#include "ppspec/quadrature.hpp"
#include "ppspec/rng.hpp"

namespace ppspec {

IntensityField IntensityField::constant(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("intensity must be positive");
    return IntensityField{[lambda](std::span<const double>) { return lambda; }, lambda};
}

std::complex<double> ir_dft(const PointPattern& pattern, const Taper& taper,
                            const IntensityField& intensity, std::span<const double> omega) {
    const int d = pattern.dim();
    const Window& win = pattern.window();
    std::complex<double> sum(0.0, 0.0);
    double scaled[3];
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const double* x = pattern.point(i);
        double phase = 0.0;
        for (int j = 0; j < d; ++j) {
            scaled[j] = x[j] / win.side(j);
            phase += x[j] * omega[static_cast<std::size_t>(j)];
        }
        const std::span<const double> sc(scaled, static_cast<std::size_t>(d));
        const double lam = intensity.lambda_bar(sc);
        if (!(lam > 0.0))
            throw std::invalid_argument("intensity evaluates nonpositive at an observed point");
        sum += taper.value(sc) / lam * std::complex<double>(std::cos(phase), -std::sin(phase));
    }
    const double norm = std::pow(2.0 * M_PI, -0.5 * d) /
                        std::sqrt(taper.moment(2) * win.volume());
    return norm * sum;
}

double ir_periodogram(const PointPattern& pattern, const Taper& taper,
                      const IntensityField& intensity, std::span<const double> omega) {
    return std::norm(ir_dft(pattern, taper, intensity, omega) -
                     bias_factor(taper, pattern.window(), omega));
}

double taper_sq_over_intensity_moment(const Taper& taper, const IntensityField& intensity,
                                      int dim) {
    double x[3] = {0.0, 0.0, 0.0};
    std::function<double(int)> nest = [&](int axis) -> double {
        if (axis == dim) {
            const std::span<const double> sp(x, static_cast<std::size_t>(dim));
            const double lam = intensity.lambda_bar(sp);
            if (!(lam > 0.0))
                throw std::invalid_argument("intensity must be strictly positive on the cube");
            double h = 1.0;
            for (int j = 0; j < dim; ++j) h *= taper.value1d(x[j]);
            return h * h / lam;
        }
        return integrate<double>(
            [&](double t) {
                x[axis] = t;
                return nest(axis + 1);
            },
            -0.5, 0.5, axis == 0 ? 1e-10 : 1e-11, 1e-9);
    };
    return nest(0);
}

double ir_psd(const std::function<double(double)>& ell2_radial, const Taper& taper,
              const IntensityField& intensity, int dim, std::span<const double> omega) {
    double w2 = 0.0;
    for (double wi : omega) w2 += wi * wi;
    const double moment = taper_sq_over_intensity_moment(taper, intensity, dim);
    const double flat = moment / taper.moment(2) / std::pow(2.0 * M_PI, dim);
    return flat + radial_inverse_fourier(ell2_radial, dim, std::sqrt(w2));
}

PointPattern simulate_inhomogeneous_poisson(const IntensityField& intensity,
                                            const Window& window, std::uint64_t seed) {
    const int d = window.dim();
    // dominating rate: coarse scan of the rescaled cube for the maximum
    double lambda_max = intensity.lambda_min;
    const int probes = 64;
    double x[3] = {0.0, 0.0, 0.0};
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    auto scan = [&](auto&& self, int axis) -> void {
        if (axis == d) {
            const std::span<const double> sp(x, static_cast<std::size_t>(d));
            lambda_max = std::max(lambda_max, intensity.lambda_bar(sp));
            return;
        }
        for (int i = 0; i <= probes; ++i) {
            x[axis] = -0.5 + static_cast<double>(i) / probes;
            self(self, axis + 1);
        }
    };
    scan(scan, 0);
    lambda_max *= 1.05;  // headroom over the scan maximum
    if (!(lambda_max > 0.0)) throw std::invalid_argument("intensity field is nonpositive");

    Philox2x64 rng(seed, 0x1901ULL);
    const std::uint64_t n_dom = rng.next_poisson(lambda_max * window.volume());
    std::vector<double> pts;
    double y[3], scaled[3];
    for (std::uint64_t i = 0; i < n_dom; ++i) {
        for (int j = 0; j < d; ++j) {
            y[j] = window.side(j) * (rng.next_double() - 0.5);
            scaled[j] = y[j] / window.side(j);
        }
        const double lam =
            intensity.lambda_bar(std::span<const double>(scaled, static_cast<std::size_t>(d)));
        if (rng.next_double() * lambda_max < lam) pts.insert(pts.end(), y, y + d);
    }
    return PointPattern(window, std::move(pts));
}

}  // namespace ppspec
