#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>

#include "ppspec/dft.hpp"
#include "ppspec/rng.hpp"
#include "ppspec/simulate.hpp"
#include "test_helpers.hpp"

using namespace ppspec;
using Family = SpectralModel::Family;

namespace {

PointPattern random_pattern(const Window& win, std::size_t n, std::uint64_t seed) {
    Philox2x64 rng(seed, 9);
    std::vector<double> pts;
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < win.dim(); ++j)
            pts.push_back(win.side(j) * (rng.next_double() - 0.5));
    }
    return PointPattern(win, std::move(pts));
}

}  // namespace

TEST_CASE("dft basics") {
    const Window win = Window::cube(2, 10.0);
    const Taper uni = Taper::uniform(2);

    const PointPattern empty(win, {});
    const double w0[2] = {0.7, -0.3};
    CHECK(std::abs(dft(empty, uni, std::span<const double>(w0, 2))) == 0.0);
    CHECK(intensity_hat(empty, uni) == 0.0);

    const PointPattern origin(win, {0.0, 0.0});
    for (double wx : {0.0, 1.0, -2.2}) {
        const double w[2] = {wx, 0.5 * wx};
        const auto val = dft(origin, uni, std::span<const double>(w, 2));
        CHECK(val.real() == doctest::Approx(1.0 / (2.0 * M_PI) / 10.0).epsilon(1e-14));
        CHECK(val.imag() == doctest::Approx(0.0));
    }
}

TEST_CASE("dft equals the naive summation oracle exactly") {
    const Window win = Window::cube(2, 10.0);
    const Taper taper = Taper::smooth(2, 0.025);
    const PointPattern pattern = random_pattern(win, 50, 17);
    const double w[2] = {0.7, -0.3};

    // same elementary operations in canonical point order
    std::complex<double> naive(0.0, 0.0);
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const double* x = pattern.point(i);
        const double scaled[2] = {x[0] / 10.0, x[1] / 10.0};
        const double h = taper.value(std::span<const double>(scaled, 2));
        const double phase = x[0] * w[0] + x[1] * w[1];
        naive += h * std::complex<double>(std::cos(phase), -std::sin(phase));
    }
    naive *= std::pow(2.0 * M_PI, -1.0) / std::sqrt(taper.moment(2) * 100.0);
    const auto lib = dft(pattern, taper, std::span<const double>(w, 2));
    CHECK(lib.real() == naive.real());
    CHECK(lib.imag() == naive.imag());
}

TEST_CASE("intensity estimator") {
    const Window win = Window::cube(2, 40.0);
    const Taper uni = Taper::uniform(2);
    const PointPattern pattern = random_pattern(win, 800, 23);
    CHECK(intensity_hat(pattern, uni) == 0.5);  // count / |D_n| exactly
    const Taper smooth = Taper::smooth(2, 0.025);
    CHECK(intensity_hat(pattern, smooth) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("periodogram symmetry and zero at the origin") {
    const Window win = Window::cube(2, 10.0);
    for (const Taper& taper : {Taper::uniform(2), Taper::smooth(2, 0.025)}) {
        const PointPattern pattern = random_pattern(win, 60, 31);
        const double zero[2] = {0.0, 0.0};
        CHECK(periodogram(pattern, taper, std::span<const double>(zero, 2)) <= 1e-20);
        Philox2x64 rng(5, 0);
        for (int i = 0; i < 10; ++i) {
            const double w[2] = {4.0 * (rng.next_double() - 0.5),
                                 4.0 * (rng.next_double() - 0.5)};
            const double wm[2] = {-w[0], -w[1]};
            const double ip = periodogram(pattern, taper, std::span<const double>(w, 2));
            const double im = periodogram(pattern, taper, std::span<const double>(wm, 2));
            CHECK(ip == im);  // cosine/sine parity makes this exact
            const auto jp = dft(pattern, taper, std::span<const double>(w, 2));
            const auto jm = dft(pattern, taper, std::span<const double>(wm, 2));
            CHECK(jp.real() == jm.real());
            CHECK(jp.imag() == -jm.imag());
        }
    }
}

TEST_CASE("feasible and infeasible centering agree when lambda matches") {
    const Window win = Window::cube(2, 10.0);
    const Taper taper = Taper::smooth(2, 0.025);
    const PointPattern pattern = random_pattern(win, 40, 77);
    const double w[2] = {0.9, 0.4};
    const double lam = intensity_hat(pattern, taper);
    CHECK(dft_centered(pattern, taper, std::span<const double>(w, 2)) ==
          dft_centered_with_lambda(pattern, taper, std::span<const double>(w, 2), lam));
}

TEST_CASE("fast grid path equals the pointwise reference") {
    Philox2x64 rng(2024, 0);
    for (int instance = 0; instance < 100; ++instance) {
        const int d = 1 + static_cast<int>(rng.next_u64() % 2);
        const double side = 6.0 + 10.0 * rng.next_double();
        const Window win = Window::cube(d, side);
        const Taper taper = (instance % 2 == 0) ? Taper::uniform(d)
                                                : Taper::smooth(d, 0.01 + 0.4 * rng.next_double());
        const std::size_t n = 20 + rng.next_u64() % 60;
        const PointPattern pattern =
            random_pattern(win, n, 1000 + static_cast<std::uint64_t>(instance));
        const double d1 = 1.5 + 3.0 * rng.next_double();
        const double d0 = rng.next_double() < 0.3 ? 0.0 : 0.2;
        const FrequencyGrid grid = build_grid(win, DomainSpec(d0, d1), SpacingRule::side());

        const PeriodogramField fast = periodogram_grid(pattern, taper, grid);
        const PeriodogramField slow = reference::periodogram_grid_pointwise(pattern, taper, grid);
        REQUIRE(fast.values.size() == slow.values.size());
        double max_rel = 0.0;
        double scale = 0.0;
        for (double v : slow.values) scale = std::max(scale, v);
        for (std::size_t i = 0; i < fast.values.size(); ++i) {
            max_rel = std::max(max_rel, std::abs(fast.values[i] - slow.values[i]) /
                                            std::max(scale, 1e-300));
        }
        CHECK(max_rel <= 1e-10);
        CHECK(fast.lambda_hat == slow.lambda_hat);
    }
}

TEST_CASE("grid periodogram of an empty pattern vanishes") {
    const Window win = Window::cube(2, 10.0);
    const PointPattern empty(win, {});
    const FrequencyGrid grid =
        build_grid(win, DomainSpec(0.0, 2.0 * M_PI), SpacingRule::side());
    const PeriodogramField field = periodogram_grid(empty, Taper::smooth(2, 0.025), grid);
    CHECK(field.lambda_hat == 0.0);
    for (double v : field.values) CHECK(v == 0.0);
}

TEST_CASE("3-d grid periodogram matches pointwise") {
    const Window win = Window::cube(3, 6.0);
    const Taper taper = Taper::smooth(3, 0.1);
    const PointPattern pattern = random_pattern(win, 40, 4000);
    const FrequencyGrid grid = build_grid(win, DomainSpec(0.0, 2.5), SpacingRule::side());
    const PeriodogramField fast = periodogram_grid(pattern, taper, grid);
    const PeriodogramField slow = reference::periodogram_grid_pointwise(pattern, taper, grid);
    for (std::size_t i = 0; i < fast.values.size(); ++i) {
        CHECK(fast.values[i] == doctest::Approx(slow.values[i]).epsilon(1e-10));
    }
}

TEST_CASE("periodogram sampling moments" * doctest::test_suite("montecarlo")) {
    SUBCASE("intensity estimator is unbiased on poisson data") {
        const Window win = Window::cube(2, 40.0);
        const SpectralModel m(Family::Poisson, 2, {0.5});
        const Taper taper = Taper::smooth(2, 0.025);
        std::vector<double> lams;
        for (int r = 0; r < 500; ++r) {
            lams.push_back(intensity_hat(
                simulate(m, win, derive_seed(200, static_cast<std::uint64_t>(r))), taper));
        }
        const double se = std::sqrt(0.5 / 1600.0 / 500.0);
        CHECK(std::abs(testutil::mean(lams) - 0.5) <= 3.0 * se);
    }

    SUBCASE("mean periodogram approaches the poisson spectrum") {
        const Window win = Window::cube(2, 40.0);
        const SpectralModel m(Family::Poisson, 2, {0.5});
        const Taper taper = Taper::smooth(2, 0.025);
        const double w[2] = {M_PI, M_PI};
        std::vector<double> vals;
        for (int r = 0; r < 2000; ++r) {
            vals.push_back(periodogram(
                simulate(m, win, derive_seed(300, static_cast<std::uint64_t>(r))), taper,
                std::span<const double>(w, 2)));
        }
        const double f = 0.5 / std::pow(2.0 * M_PI, 2);
        CHECK(std::abs(testutil::mean(vals) - f) <= 3.0 * testutil::se_of_mean(vals));
    }

    SUBCASE("mean periodogram approaches the thomas spectrum at 5 frequencies") {
        const Window win = Window::cube(2, 40.0);
        const SpectralModel m(Family::Thomas, 2, {0.2, 10.0, 0.25});
        const Taper taper = Taper::smooth(2, 0.025);
        const double freqs[5][2] = {
            {M_PI / 2, 0.0}, {M_PI, M_PI}, {2.0, -1.0}, {0.5, 0.5}, {4.0, 3.0}};
        std::vector<std::vector<double>> vals(5);
        for (int r = 0; r < 500; ++r) {
            const PointPattern pat =
                simulate(m, win, derive_seed(400, static_cast<std::uint64_t>(r)));
            for (int q = 0; q < 5; ++q) {
                vals[static_cast<std::size_t>(q)].push_back(
                    periodogram(pat, taper, std::span<const double>(freqs[q], 2)));
            }
        }
        for (int q = 0; q < 5; ++q) {
            const auto& v = vals[static_cast<std::size_t>(q)];
            const double f = m.spectral_density(std::span<const double>(freqs[q], 2));
            CHECK(std::abs(testutil::mean(v) - f) <= 3.0 * testutil::se_of_mean(v));
        }
    }

    SUBCASE("2 I / f is approximately chi-squared with 2 degrees of freedom") {
        const Window win = Window::cube(2, 40.0);
        const SpectralModel m(Family::Poisson, 2, {1.0});
        const Taper taper = Taper::smooth(2, 0.025);
        const double w[2] = {M_PI, M_PI};
        const double f = 1.0 / std::pow(2.0 * M_PI, 2);
        std::vector<double> scaled;
        for (int r = 0; r < 2000; ++r) {
            scaled.push_back(
                2.0 *
                periodogram(simulate(m, win, derive_seed(500, static_cast<std::uint64_t>(r))),
                            taper, std::span<const double>(w, 2)) /
                f);
        }
        const double d_stat = testutil::ks_statistic(
            scaled, [](double x) { return 1.0 - std::exp(-0.5 * x); });
        CHECK(d_stat < testutil::ks_critical(0.01, scaled.size()));
    }
}

TEST_CASE("blocked factor product is bit-identical to the single-block path") {
    const Window win = Window::cube(2, 20.0);
    const Taper taper = Taper::smooth(2, 0.025);
    const PointPattern pattern = random_pattern(win, 500, 91);
    const FrequencyGrid grid =
        build_grid(win, DomainSpec(0.0, 3.0), SpacingRule::side());
    const PeriodogramField whole = periodogram_grid(pattern, taper, grid, {}, 1 << 20);
    const PeriodogramField blocked = periodogram_grid(pattern, taper, grid, {}, 64);
    CHECK(whole.values == blocked.values);
}

TEST_CASE("grid field is even in the lattice index") {
    const Window win = Window::cube(2, 20.0);
    const Taper taper = Taper::smooth(2, 0.025);
    const PointPattern pattern = random_pattern(win, 120, 321);
    const FrequencyGrid grid = build_grid(win, DomainSpec(0.3, 3.0), SpacingRule::side());
    const PeriodogramField field = periodogram_grid(pattern, taper, grid);
    std::map<std::pair<int, int>, double> by_index;
    for (std::size_t i = 0; i < grid.size(); ++i)
        by_index[{grid.index(i)[0], grid.index(i)[1]}] = field.values[i];
    double scale = 0.0;
    for (double v : field.values) scale = std::max(scale, v);
    for (const auto& [k, v] : by_index) {
        const double mirror = by_index.at({-k.first, -k.second});
        CHECK(std::abs(v - mirror) <= 1e-12 * scale);
    }
}

TEST_CASE("dft result bundles the centering identity") {
    const Window win = Window::cube(2, 10.0);
    const Taper taper = Taper::smooth(2, 0.025);
    const PointPattern pattern = random_pattern(win, 30, 55);
    const double w[2] = {0.8, -0.4};
    const DftResult res = dft_result(pattern, taper, std::span<const double>(w, 2));
    CHECK(res.lambda_hat == intensity_hat(pattern, taper));
    CHECK(res.raw == dft(pattern, taper, std::span<const double>(w, 2)));
    CHECK(res.centered ==
          res.raw - res.lambda_hat * bias_factor(taper, win, std::span<const double>(w, 2)));
    const double zero[2] = {0.0, 0.0};
    CHECK(std::abs(dft_result(pattern, taper, std::span<const double>(zero, 2)).centered) <=
          1e-13);
}
