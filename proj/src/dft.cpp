#include "ppspec/dft.hpp"

#include <cmath>
#include <vector>

namespace ppspec {

namespace {

double dft_norm(const PointPattern& pattern, const Taper& taper) {
    const int d = pattern.dim();
    return std::pow(2.0 * M_PI, -0.5 * d) /
           std::sqrt(taper.moment(2) * pattern.window().volume());
}

}  // namespace

std::complex<double> dft(const PointPattern& pattern, const Taper& taper,
                         std::span<const double> omega) {
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
        const double h = taper.value(std::span<const double>(scaled, static_cast<std::size_t>(d)));
        sum += h * std::complex<double>(std::cos(phase), -std::sin(phase));
    }
    return dft_norm(pattern, taper) * sum;
}

double intensity_hat(const PointPattern& pattern, const Taper& taper) {
    const int d = pattern.dim();
    const Window& win = pattern.window();
    double sum = 0.0;
    double scaled[3];
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const double* x = pattern.point(i);
        for (int j = 0; j < d; ++j) scaled[j] = x[j] / win.side(j);
        sum += taper.value(std::span<const double>(scaled, static_cast<std::size_t>(d)));
    }
    return sum / (taper.moment(1) * win.volume());
}

std::complex<double> dft_centered_with_lambda(const PointPattern& pattern, const Taper& taper,
                                              std::span<const double> omega, double lambda) {
    return dft(pattern, taper, omega) -
           lambda * bias_factor(taper, pattern.window(), omega);
}

std::complex<double> dft_centered(const PointPattern& pattern, const Taper& taper,
                                  std::span<const double> omega) {
    return dft_centered_with_lambda(pattern, taper, omega, intensity_hat(pattern, taper));
}

DftResult dft_result(const PointPattern& pattern, const Taper& taper,
                     std::span<const double> omega) {
    DftResult out;
    for (std::size_t j = 0; j < omega.size(); ++j) out.omega[j] = omega[j];
    out.lambda_hat = intensity_hat(pattern, taper);
    out.raw = dft(pattern, taper, omega);
    out.centered = out.raw - out.lambda_hat * bias_factor(taper, pattern.window(), omega);
    return out;
}

double periodogram(const PointPattern& pattern, const Taper& taper,
                   std::span<const double> omega) {
    return std::norm(dft_centered(pattern, taper, omega));
}

namespace {

// Per-axis factor rows v[j][k] = h1(x_j/A) exp(-i x_j w_k) for k = -hull..hull
// and points j in [begin, end), filled with one trig call per point and
// incremental phase rotation along k.
void fill_factor(const PointPattern& pattern, const Taper& taper, int axis, int hull,
                 double step, std::size_t begin, std::size_t end, std::vector<double>& re,
                 std::vector<double>& im) {
    const std::size_t cols = static_cast<std::size_t>(2 * hull + 1);
    re.resize((end - begin) * cols);
    im.resize((end - begin) * cols);
    const double side = pattern.window().side(axis);
#pragma omp parallel for schedule(static)
    for (long long jj = static_cast<long long>(begin); jj < static_cast<long long>(end); ++jj) {
        const std::size_t j = static_cast<std::size_t>(jj);
        const double x = pattern.point(j)[axis];
        const double h = taper.value1d(x / side);
        const double theta = x * step;
        const std::complex<double> rot(std::cos(theta), -std::sin(theta));
        std::complex<double> cur(std::cos(hull * theta), std::sin(hull * theta));  // k = -hull
        double* rrow = re.data() + (j - begin) * cols;
        double* irow = im.data() + (j - begin) * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            rrow[c] = h * cur.real();
            irow[c] = h * cur.imag();
            cur *= rot;
        }
    }
}

}  // namespace

PeriodogramField periodogram_grid(const PointPattern& pattern, const Taper& taper,
                                  const FrequencyGrid& grid,
                                  std::optional<double> lambda_override,
                                  std::size_t max_block_points) {
    const int d = pattern.dim();
    if (grid.dim() != d) throw std::invalid_argument("grid and pattern dimensions differ");
    const Window& win = pattern.window();
    const double lambda_hat =
        lambda_override ? *lambda_override : intensity_hat(pattern, taper);
    const double norm = dft_norm(pattern, taper);
    const int hull = grid.ring_hi();
    const std::size_t cols = static_cast<std::size_t>(2 * hull + 1);
    const double step = kTwoPi / grid.spacing();
    const std::size_t n = pattern.size();

    // per-axis taper transforms u_i(w_k, A_i) (real-valued for both families)
    std::vector<std::vector<double>> u(static_cast<std::size_t>(d));
    for (int axis = 0; axis < d; ++axis) {
        u[static_cast<std::size_t>(axis)].resize(cols);
        for (std::size_t c = 0; c < cols; ++c) {
            const double w = step * (static_cast<double>(c) - hull);
            u[static_cast<std::size_t>(axis)][c] =
                taper.ft1d(w, win.side(axis)).real();
        }
    }

    // hull DFT values J(k1,..,kd), row-major over the hull cube; points are
    // processed in bounded blocks so the factor-matrix memory stays capped,
    // with a fixed accumulation order to keep results bit-stable
    std::size_t hull_total = 1;
    for (int i = 0; i < d; ++i) hull_total *= cols;
    std::vector<double> jre(hull_total, 0.0), jim(hull_total, 0.0);

    std::vector<std::vector<double>> re(static_cast<std::size_t>(d)),
        im(static_cast<std::size_t>(d));
    for (std::size_t begin = 0; begin < n; begin += max_block_points) {
        const std::size_t end = std::min(n, begin + max_block_points);
        const std::size_t block = end - begin;
        for (int axis = 0; axis < d; ++axis) {
            fill_factor(pattern, taper, axis, hull, step, begin, end,
                        re[static_cast<std::size_t>(axis)], im[static_cast<std::size_t>(axis)]);
        }
        if (d == 1) {
            for (std::size_t j = 0; j < block; ++j) {
                const double* r0 = re[0].data() + j * cols;
                const double* i0 = im[0].data() + j * cols;
                for (std::size_t c = 0; c < cols; ++c) {
                    jre[c] += r0[c];
                    jim[c] += i0[c];
                }
            }
        } else if (d == 2) {
#pragma omp parallel for schedule(static)
            for (long long k1 = 0; k1 < static_cast<long long>(cols); ++k1) {
                double* orow = jre.data() + static_cast<std::size_t>(k1) * cols;
                double* irow = jim.data() + static_cast<std::size_t>(k1) * cols;
                for (std::size_t j = 0; j < block; ++j) {
                    const double ar = re[0][j * cols + static_cast<std::size_t>(k1)];
                    const double ai = im[0][j * cols + static_cast<std::size_t>(k1)];
                    const double* br = re[1].data() + j * cols;
                    const double* bi = im[1].data() + j * cols;
                    for (std::size_t c = 0; c < cols; ++c) {
                        orow[c] += ar * br[c] - ai * bi[c];
                        irow[c] += ar * bi[c] + ai * br[c];
                    }
                }
            }
        } else {
#pragma omp parallel for schedule(static)
            for (long long k1 = 0; k1 < static_cast<long long>(cols); ++k1) {
                double* orow = jre.data() + static_cast<std::size_t>(k1) * cols * cols;
                double* irow = jim.data() + static_cast<std::size_t>(k1) * cols * cols;
                for (std::size_t j = 0; j < block; ++j) {
                    const double ar = re[0][j * cols + static_cast<std::size_t>(k1)];
                    const double ai = im[0][j * cols + static_cast<std::size_t>(k1)];
                    const double* br = re[1].data() + j * cols;
                    const double* bi = im[1].data() + j * cols;
                    const double* cr = re[2].data() + j * cols;
                    const double* ci = im[2].data() + j * cols;
                    for (std::size_t c2 = 0; c2 < cols; ++c2) {
                        const double pr = ar * br[c2] - ai * bi[c2];
                        const double pi = ar * bi[c2] + ai * br[c2];
                        double* orow2 = orow + c2 * cols;
                        double* irow2 = irow + c2 * cols;
                        for (std::size_t c3 = 0; c3 < cols; ++c3) {
                            orow2[c3] += pr * cr[c3] - pi * ci[c3];
                            irow2[c3] += pr * ci[c3] + pi * cr[c3];
                        }
                    }
                }
            }
        }
    }

    // keep annulus points: feasible centering against the rank-one bias term
    PeriodogramField field{grid, std::vector<double>(grid.size()), taper.id(), win, lambda_hat};
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(grid.size()); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const int* k = grid.index(i);
        std::size_t flat = 0;
        double bias = 1.0;
        for (int j = 0; j < d; ++j) {
            flat = flat * cols + static_cast<std::size_t>(k[j] + hull);
            bias *= u[static_cast<std::size_t>(j)][static_cast<std::size_t>(k[j] + hull)];
        }
        const double cre = norm * (jre[flat] - lambda_hat * bias);
        const double cim = norm * jim[flat];
        field.values[i] = cre * cre + cim * cim;
    }
    return field;
}

namespace reference {

PeriodogramField periodogram_grid_pointwise(const PointPattern& pattern, const Taper& taper,
                                            const FrequencyGrid& grid) {
    PeriodogramField field{grid, std::vector<double>(grid.size()), taper.id(), pattern.window(),
                           intensity_hat(pattern, taper)};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double* w = grid.frequency(i);
        field.values[i] = std::norm(dft_centered_with_lambda(
            pattern, taper, std::span<const double>(w, static_cast<std::size_t>(grid.dim())),
            field.lambda_hat));
    }
    return field;
}

}  // namespace reference

}  // namespace ppspec
