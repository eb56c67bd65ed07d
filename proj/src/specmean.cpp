#include "ppspec/specmean.hpp"

namespace ppspec {

SpectralFunctional SpectralFunctional::constant(double value) {
    return {1, [value](std::span<const double>, std::span<double> out) { out[0] = value; }};
}

SpectralFunctional SpectralFunctional::scalar(
    std::function<double(std::span<const double>)> f) {
    return {1, [f = std::move(f)](std::span<const double> w, std::span<double> out) {
                out[0] = f(w);
            }};
}

std::vector<double> spectral_mean_true(const SpectralModel& model,
                                       const SpectralFunctional& phi,
                                       const FrequencyGrid& grid) {
    const auto f = spectral_density_on_grid(model, grid);
    std::vector<double> acc(static_cast<std::size_t>(phi.n_out), 0.0);
    std::vector<double> val(static_cast<std::size_t>(phi.n_out));
    const std::size_t d = static_cast<std::size_t>(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        phi.eval(std::span<const double>(grid.frequency(i), d), val);
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += val[c] * f[i];
    }
    const double cell = grid.cell_measure();
    for (double& a : acc) a *= cell;
    return acc;
}

std::vector<double> spectral_mean_estimate(const PeriodogramField& field,
                                           const SpectralFunctional& phi) {
    const FrequencyGrid& grid = field.grid;
    std::vector<double> acc(static_cast<std::size_t>(phi.n_out), 0.0);
    std::vector<double> val(static_cast<std::size_t>(phi.n_out));
    const std::size_t d = static_cast<std::size_t>(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        phi.eval(std::span<const double>(grid.frequency(i), d), val);
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += val[c] * field.values[i];
    }
    const double cell = grid.cell_measure();
    for (double& a : acc) a *= cell;
    return acc;
}

}  // namespace ppspec
