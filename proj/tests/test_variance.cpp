#include <doctest.h>

#include <cmath>

#include "ppspec/dft.hpp"
#include "ppspec/rng.hpp"
#include "ppspec/simulate.hpp"
#include "ppspec/variance.hpp"
#include "test_helpers.hpp"

using namespace ppspec;
using Family = SpectralModel::Family;

namespace {

PointPattern poisson_pattern(double lambda, double side, std::uint64_t seed) {
    return simulate(SpectralModel(Family::Poisson, 2, {lambda}), Window::cube(2, side), seed);
}

}  // namespace

TEST_CASE("subsampling degenerate cases") {
    const Taper taper = Taper::smooth(2, 0.025);
    const DomainSpec dom(M_PI / 10.0, 2.0 * M_PI);
    const PointPattern pat = poisson_pattern(1.0, 40.0, 11);
    SubsampleConfig cfg;
    cfg.block_side = 8.0;

    SUBCASE("phi = 0 gives zero variance") {
        const auto zeta = subsample_variance(pat, SpectralFunctional::constant(0.0), dom,
                                             taper, SpacingRule::side(), cfg);
        CHECK(zeta.size() == 1);
        CHECK(zeta[0] == 0.0);
    }

    SUBCASE("empty pattern gives identical (zero) blocks") {
        const PointPattern empty(Window::cube(2, 40.0), {});
        const auto zeta = subsample_variance(empty, SpectralFunctional::constant(1.0), dom,
                                             taper, SpacingRule::side(), cfg);
        CHECK(zeta[0] == 0.0);
    }

    SUBCASE("a single block has zero spread") {
        SubsampleConfig one;
        one.block_side = 39.5;
        one.stride = 1.0;
        one.min_blocks = 1;
        const auto zeta = subsample_variance(pat, SpectralFunctional::constant(1.0), dom,
                                             taper, SpacingRule::side(), one);
        CHECK(zeta[0] == 0.0);
    }

    SUBCASE("block validation") {
        SubsampleConfig bad;
        bad.block_side = 50.0;
        CHECK_THROWS(subsample_variance(pat, SpectralFunctional::constant(1.0), dom, taper,
                                        SpacingRule::side(), bad));
        SubsampleConfig few;
        few.block_side = 18.0;
        few.stride = 20.0;
        few.min_blocks = 20;
        CHECK_THROWS_WITH_AS(subsample_variance(pat, SpectralFunctional::constant(1.0), dom,
                                                taper, SpacingRule::side(), few),
                             "window too small for subsampling", std::invalid_argument);
    }

    SUBCASE("default block side follows the square-root rule") {
        SubsampleConfig def;
        CHECK(def.resolved_block(Window::cube(2, 40.0)) == doctest::Approx(7.0));
        CHECK(def.resolved_block(Window::cube(2, 10.0)) == doctest::Approx(4.0));
    }
}

TEST_CASE("subsampling determinism and nonnegative-definiteness") {
    const Taper taper = Taper::smooth(2, 0.025);
    const DomainSpec dom(M_PI / 10.0, 2.0 * M_PI);
    const PointPattern pat = poisson_pattern(1.0, 20.0, 12);
    SubsampleConfig cfg;
    cfg.block_side = 6.0;

    SpectralFunctional phi;
    phi.n_out = 2;
    phi.eval = [](std::span<const double> w, std::span<double> out) {
        out[0] = 1.0;
        out[1] = w[0] * w[0] + w[1] * w[1];
    };
    const auto zeta1 = subsample_variance(pat, phi, dom, taper, SpacingRule::side(), cfg);
    const auto zeta2 = subsample_variance(pat, phi, dom, taper, SpacingRule::side(), cfg);
    CHECK(zeta1 == zeta2);  // deterministic reduction, thread-count independent

    CHECK(zeta1[1] == doctest::Approx(zeta1[2]).epsilon(1e-14));  // symmetric
    const auto eig = sym_eigenvalues(zeta1, 2);
    for (double e : eig) CHECK(e >= -1e-12 * std::abs(eig.back()));
}

TEST_CASE("gamma matrix plug-in") {
    const Window win = Window::cube(2, 20.0);
    const DomainSpec dom(M_PI / 10.0, 2.0 * M_PI);
    const FrequencyGrid grid = build_grid(win, dom, SpacingRule::side());

    SUBCASE("poisson closed form") {
        const SpectralModel m(Family::Poisson, 2, {0.8});
        // with f_ref = f_theta the curvature term drops and
        // Gamma = cell K / (2 (2pi)^2 lambda^2)
        const auto f_ref = spectral_density_on_grid(m, grid);
        const GammaMatrix g = gamma_matrix(m, f_ref, grid);
        const double expected = grid.cell_measure() * static_cast<double>(grid.size()) /
                                (2.0 * std::pow(2.0 * M_PI, 2) * 0.64);
        CHECK(g.values[0] == doctest::Approx(expected).epsilon(1e-12));
        CHECK_FALSE(g.ill_conditioned);
    }

    SUBCASE("correct specification gives a nonnegative-definite gamma") {
        const SpectralModel m(Family::Thomas, 2, {0.2, 10.0, 0.25});
        const auto f_ref = spectral_density_on_grid(m, grid);
        const GammaMatrix g = gamma_matrix(m, f_ref, grid);
        // symmetry
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                CHECK(g.values[static_cast<std::size_t>(3 * r + c)] ==
                      doctest::Approx(g.values[static_cast<std::size_t>(3 * c + r)]));
        const auto eig = sym_eigenvalues(g.values, 3);
        for (double e : eig) CHECK(e > 0.0);
    }
}

TEST_CASE("linear algebra helpers") {
    const std::vector<double> m{4.0, 1.0, 1.0, 3.0};
    const auto inv = invert_spd(m, 2);
    CHECK(inv[0] == doctest::Approx(3.0 / 11.0));
    CHECK(inv[1] == doctest::Approx(-1.0 / 11.0));
    CHECK(inv[3] == doctest::Approx(4.0 / 11.0));
    const auto eig = sym_eigenvalues(m, 2);
    CHECK(eig[0] == doctest::Approx(3.5 - std::sqrt(1.25)));
    CHECK(eig[1] == doctest::Approx(3.5 + std::sqrt(1.25)));
    CHECK_THROWS(invert_spd({0.0, 0.0, 0.0, 0.0}, 2));

    CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-5));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    CHECK_THROWS(normal_quantile(0.0));
    CHECK_THROWS(normal_quantile(1.0));
}

TEST_CASE("confidence interval validation") {
    const Taper taper = Taper::smooth(2, 0.025);
    const DomainSpec dom(M_PI / 10.0, 2.0 * M_PI);
    const PointPattern pat = poisson_pattern(1.0, 20.0, 14);
    const FitResult fr = fit(pat, Family::Poisson, dom, taper, SpacingRule::side());
    SubsampleConfig cfg;
    cfg.block_side = 5.0;
    CHECK_THROWS(whittle_ci(fr, pat, taper, dom, SpacingRule::side(), cfg, 0.0));
    CHECK_THROWS(whittle_ci(fr, pat, taper, dom, SpacingRule::side(), cfg, 1.0));
    const auto cis = whittle_ci(fr, pat, taper, dom, SpacingRule::side(), cfg, 0.05);
    REQUIRE(cis.size() == 1);
    CHECK(cis[0].lower < fr.theta[0]);
    CHECK(cis[0].upper > fr.theta[0]);
    CHECK(cis[0].variance > 0.0);
    // width neither collapses nor explodes relative to the parameter scale
    const double width = cis[0].upper - cis[0].lower;
    CHECK(width > 1e-4);
    CHECK(width < 10.0 * fr.theta[0]);
}

TEST_CASE("subsampling tracks the Monte Carlo variance"
          * doctest::test_suite("montecarlo")) {
    const Taper taper = Taper::smooth(2, 0.025);
    const DomainSpec dom(M_PI / 10.0, 2.0 * M_PI);
    const Window win = Window::cube(2, 40.0);
    const SpectralModel m(Family::Poisson, 2, {1.0});
    const FrequencyGrid grid = build_grid(win, dom, SpacingRule::side());
    const auto phi = SpectralFunctional::constant(1.0);

    // direct Monte Carlo estimate of |D_n| var(A_hat)
    std::vector<double> means;
    for (int r = 0; r < 300; ++r) {
        const PointPattern pat =
            simulate(m, win, derive_seed(1000, static_cast<std::uint64_t>(r)));
        means.push_back(spectral_mean_estimate(periodogram_grid(pat, taper, grid), phi)[0]);
    }
    const double mc_target = 1600.0 * testutil::sample_var(means);

    SubsampleConfig cfg;
    cfg.block_side = 8.0;
    const auto zeta = subsample_variance(
        simulate(m, win, derive_seed(1000, 777)), phi, dom, taper, SpacingRule::side(), cfg);
    CHECK(zeta[0] <= 2.0 * mc_target);
    CHECK(zeta[0] >= 0.5 * mc_target);
}

TEST_CASE("interval widths shrink at the root-volume rate"
          * doctest::test_suite("montecarlo")) {
    const Taper taper = Taper::smooth(2, 0.025);
    const DomainSpec dom(M_PI / 10.0, 2.0 * M_PI);
    SubsampleConfig cfg;  // default block/stride

    auto width = [&](double side, std::uint64_t seed) {
        const PointPattern pat = poisson_pattern(1.0, side, seed);
        const FitResult fr = fit(pat, Family::Poisson, dom, taper, SpacingRule::side());
        const auto cis = whittle_ci(fr, pat, taper, dom, SpacingRule::side(), cfg, 0.05);
        return cis[0].upper - cis[0].lower;
    };
    // average widths over a few replicates to tame subsampling noise
    double w10 = 0.0, w20 = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        w10 += width(20.0, 2000 + s);
        w20 += width(40.0, 2100 + s);
    }
    const double ratio = w10 / w20;  // expect about sqrt(1600/400) = 2
    CHECK(ratio >= 2.0 / 1.5);
    CHECK(ratio <= 2.0 * 1.5);
}

TEST_CASE("no confidence intervals for the constrained fit") {
    const Taper taper = Taper::smooth(2, 0.025);
    const DomainSpec dom(M_PI / 10.0, 2.0 * M_PI);
    const PointPattern pat =
        simulate(SpectralModel(Family::Thomas, 2, {0.2, 10.0, 0.25}), Window::cube(2, 20.0), 8);
    const FitResult fr = fit_reduced_tcp(pat, dom, taper, SpacingRule::side());
    SubsampleConfig cfg;
    CHECK_THROWS(whittle_ci(fr, pat, taper, dom, SpacingRule::side(), cfg, 0.05));
}
