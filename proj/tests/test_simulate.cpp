#include <doctest.h>

#include <cmath>

#include "ppspec/simulate.hpp"
#include "test_helpers.hpp"

using namespace ppspec;
using Family = SpectralModel::Family;

namespace {

std::vector<double> count_series(const SpectralModel& m, const Window& win, int reps,
                                 std::uint64_t master) {
    std::vector<double> counts(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        counts[static_cast<std::size_t>(r)] = static_cast<double>(
            simulate(m, win, derive_seed(master, static_cast<std::uint64_t>(r))).size());
    }
    return counts;
}

}  // namespace

TEST_CASE("simulators are pure functions of the seed") {
    const Window win = Window::cube(2, 20.0);
    const SpectralModel models[] = {
        SpectralModel(Family::Poisson, 2, {0.5}),
        SpectralModel(Family::Thomas, 2, {0.2, 10.0, 0.25}),
        SpectralModel(Family::Matern, 2, {0.2, 10.0, 1.0}),
        SpectralModel(Family::Gdpp, 2, {1.0, 0.3025}),
        SpectralModel(Family::LgcpExp, 2, {-0.5, 2.0, 1.0}),
    };
    for (const auto& m : models) {
        const PointPattern a = simulate(m, win, 555);
        const PointPattern b = simulate(m, win, 555);
        const PointPattern c = simulate(m, win, 556);
        REQUIRE(a.size() == b.size());
        CHECK(a.coords() == b.coords());
        CHECK(a.coords() != c.coords());
    }
    const SpectralModel hawkes(Family::HawkesExp, 1, {0.5, 0.5, 1.0});
    const Window line = Window::cube(1, 100.0);
    CHECK(simulate(hawkes, line, 7).coords() == simulate(hawkes, line, 7).coords());
    CHECK_THROWS(simulate(hawkes, win, 7));  // dimension mismatch
}

TEST_CASE("degenerate thomas cluster process is almost empty") {
    const SpectralModel m(Family::Thomas, 2, {0.2, 1e-9, 0.25});
    const Window win = Window::cube(2, 40.0);
    std::size_t total = 0;
    for (int r = 0; r < 20; ++r)
        total += simulate(m, win, derive_seed(4, static_cast<std::uint64_t>(r))).size();
    CHECK(total <= 2);
}

TEST_CASE("simulator first moments" * doctest::test_suite("montecarlo")) {
    SUBCASE("poisson count moments over 500 replicates") {
        const Window win = Window::cube(2, 40.0);
        const auto counts =
            count_series(SpectralModel(Family::Poisson, 2, {0.5}), win, 500, 100);
        // exact moments: mean 800, sd sqrt(800)
        const double se = std::sqrt(800.0 / 500.0);
        CHECK(std::abs(testutil::mean(counts) - 800.0) <= 3.0 * se);
    }

    SUBCASE("thomas count over 500 replicates") {
        const Window win = Window::cube(2, 40.0);
        const auto counts =
            count_series(SpectralModel(Family::Thomas, 2, {0.2, 10.0, 0.25}), win, 500, 101);
        CHECK(std::abs(testutil::mean(counts) - 3200.0) <=
              3.0 * testutil::se_of_mean(counts));
    }

    SUBCASE("matern count over 500 replicates") {
        const Window win = Window::cube(2, 20.0);
        const auto counts =
            count_series(SpectralModel(Family::Matern, 2, {0.2, 10.0, 1.0}), win, 500, 102);
        CHECK(std::abs(testutil::mean(counts) - 800.0) <= 3.0 * testutil::se_of_mean(counts));
    }

    SUBCASE("hawkes count over 500 replicates") {
        const Window win = Window::cube(1, 200.0);
        const auto counts =
            count_series(SpectralModel(Family::HawkesExp, 1, {0.5, 0.5, 1.0}), win, 500, 103);
        // lambda = nu/(1 - a/beta) = 1
        CHECK(std::abs(testutil::mean(counts) - 200.0) <= 3.0 * testutil::se_of_mean(counts));
    }

    SUBCASE("lgcp count over 300 replicates") {
        const Window win = Window::cube(2, 20.0);
        const auto counts =
            count_series(SpectralModel(Family::LgcpExp, 2, {-0.5, 2.0, 1.0}), win, 300, 104);
        const double target = std::exp(0.5) * 400.0;
        CHECK(std::abs(testutil::mean(counts) - target) <= 3.0 * testutil::se_of_mean(counts));
    }

    SUBCASE("gdpp count and repulsion over 400 replicates") {
        const Window win = Window::cube(2, 12.0);
        const auto counts =
            count_series(SpectralModel(Family::Gdpp, 2, {1.0, 0.3025}), win, 400, 105);
        const double mean = testutil::mean(counts);
        // spectral truncation drops ~0.1% of the expected count
        CHECK(std::abs(mean - 144.0) <= 3.0 * testutil::se_of_mean(counts) + 0.5);
        // count variance strictly below the Poisson benchmark (repulsion)
        CHECK(testutil::sample_var(counts) < 0.8 * mean);
    }
}
