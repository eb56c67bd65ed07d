#include "ppspec/smoothing.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ppspec {

SmoothingKernel::SmoothingKernel(double b) : bandwidth(b) {
    if (!(b > 0.0)) throw std::invalid_argument("bandwidth must be positive");
}

double SmoothingKernel::weight(std::span<const double> offset) const {
    double w = 1.0;
    for (double x : offset) {
        const double t = std::abs(x) / bandwidth;
        if (t >= 0.5) return 0.0;
        w *= 2.0 * (1.0 - 2.0 * t) / bandwidth;
    }
    return w;
}

double default_bandwidth(const Window& window) {
    return std::pow(window.volume(), -1.0 / 6.0);
}

namespace {

// Dense (k + hull)-indexed lookup from lattice index to field position.
std::vector<long long> build_lookup(const FrequencyGrid& grid) {
    const int d = grid.dim();
    const std::size_t side = static_cast<std::size_t>(2 * grid.ring_hi() + 1);
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= side;
    std::vector<long long> lookup(total, -1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const int* k = grid.index(i);
        std::size_t flat = 0;
        for (int j = 0; j < d; ++j)
            flat = flat * side + static_cast<std::size_t>(k[j] + grid.ring_hi());
        lookup[flat] = static_cast<long long>(i);
    }
    return lookup;
}

double ksde_with_lookup(const PeriodogramField& field, const SmoothingKernel& kernel,
                        std::span<const double> omega,
                        const std::vector<long long>& lookup) {
    const FrequencyGrid& grid = field.grid;
    const int d = grid.dim();
    const double step = kTwoPi / grid.spacing();
    const int hull = grid.ring_hi();
    const std::size_t side = static_cast<std::size_t>(2 * hull + 1);
    int lo[3], hi[3];
    for (int j = 0; j < d; ++j) {
        const double w = omega[static_cast<std::size_t>(j)];
        lo[j] = std::max(-hull, static_cast<int>(std::ceil((w - 0.5 * kernel.bandwidth) / step)));
        hi[j] = std::min(hull, static_cast<int>(std::floor((w + 0.5 * kernel.bandwidth) / step)));
    }
    double num = 0.0, den = 0.0;
    int k[3] = {0, 0, 0};
    double offset[3];
    auto visit = [&](auto&& self, int axis) -> void {
        if (axis == d) {
            std::size_t flat = 0;
            for (int j = 0; j < d; ++j)
                flat = flat * side + static_cast<std::size_t>(k[j] + hull);
            const long long pos = lookup[flat];
            if (pos < 0) return;
            for (int j = 0; j < d; ++j)
                offset[j] = omega[static_cast<std::size_t>(j)] - step * k[j];
            const double w = kernel.weight(
                std::span<const double>(offset, static_cast<std::size_t>(d)));
            if (w <= 0.0) return;
            num += w * field.values[static_cast<std::size_t>(pos)];
            den += w;
            return;
        }
        for (int v = lo[axis]; v <= hi[axis]; ++v) {
            k[axis] = v;
            self(self, axis + 1);
        }
    };
    visit(visit, 0);
    if (den <= 0.0)
        throw std::invalid_argument("bandwidth below grid resolution");
    return num / den;
}

}  // namespace

double ksde(const PeriodogramField& field, const SmoothingKernel& kernel,
            std::span<const double> omega) {
    const auto lookup = build_lookup(field.grid);
    return ksde_with_lookup(field, kernel, omega, lookup);
}

std::vector<double> ksde_on_grid(const PeriodogramField& field, const SmoothingKernel& kernel) {
    const auto lookup = build_lookup(field.grid);
    std::vector<double> out(field.grid.size());
    const std::size_t d = static_cast<std::size_t>(field.grid.dim());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(field.grid.size()); ++i) {
        out[static_cast<std::size_t>(i)] = ksde_with_lookup(
            field, kernel,
            std::span<const double>(field.grid.frequency(static_cast<std::size_t>(i)), d),
            lookup);
    }
    return out;
}

}  // namespace ppspec
