#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "ppspec/geometry.hpp"
#include "ppspec/pattern_io.hpp"
#include "ppspec/rng.hpp"

using namespace ppspec;

TEST_CASE("window invariants") {
    const Window w(2, {40.0, 40.0});
    CHECK(w.volume() == doctest::Approx(1600.0));
    const double inside[2] = {19.9, -20.0};
    const double outside[2] = {20.1, 0.0};
    CHECK(w.contains(std::span<const double>(inside, 2)));
    CHECK_FALSE(w.contains(std::span<const double>(outside, 2)));
    CHECK_THROWS(Window(2, {1.0, -1.0}));
    CHECK_THROWS(Window(4, {1.0, 1.0, 1.0, 1.0}));
}

TEST_CASE("grid on the [-20,20]^2 annulus pi/10..2pi") {
    const Window win = Window::cube(2, 40.0);
    const DomainSpec dom(M_PI / 10.0, 2.0 * M_PI);
    const FrequencyGrid grid = build_grid(win, dom, SpacingRule::side());

    std::set<std::pair<int, int>> keys;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        keys.emplace(grid.index(i)[0], grid.index(i)[1]);
    }
    CHECK(keys.count({0, 0}) == 0);    // origin excluded
    CHECK(keys.count({1, 1}) == 0);    // |w|_inf < pi/10 excluded
    CHECK(keys.count({2, 0}) == 1);    // boundary |w|_inf == pi/10 kept
    CHECK(keys.count({40, 0}) == 1);   // boundary |w|_inf == 2 pi kept
    CHECK(keys.count({41, 0}) == 0);

    // brute-force enumeration oracle with the raw annulus condition
    std::size_t count = 0;
    for (int k1 = -40; k1 <= 40; ++k1) {
        for (int k2 = -40; k2 <= 40; ++k2) {
            const double winf =
                std::max(std::abs(2.0 * M_PI * k1 / 40.0), std::abs(2.0 * M_PI * k2 / 40.0));
            if (winf >= M_PI / 10.0 && winf <= 2.0 * M_PI) ++count;
        }
    }
    CHECK(grid.size() == count);
    CHECK(grid.size() == 81 * 81 - 3 * 3);  // hull minus the max|k| <= 1 square

    SUBCASE("symmetry and frequency reconstruction") {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const int* k = grid.index(i);
            CHECK(keys.count({-k[0], -k[1]}) == 1);
            for (int j = 0; j < 2; ++j) {
                CHECK(grid.frequency(i)[j] ==
                      doctest::Approx(2.0 * M_PI * k[j] / 40.0).epsilon(1e-15));
            }
        }
    }

    SUBCASE("lexicographic ordering in k") {
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const int* a = grid.index(i - 1);
            const int* b = grid.index(i);
            const bool less = a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
            CHECK(less);
        }
    }
}

TEST_CASE("grid with d0 = 0 keeps the origin") {
    const FrequencyGrid grid =
        build_grid(Window::cube(2, 10.0), DomainSpec(0.0, 2.0 * M_PI), SpacingRule::side());
    bool has_origin = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.index(i)[0] == 0 && grid.index(i)[1] == 0) has_origin = true;
    }
    CHECK(has_origin);
}

TEST_CASE("empty frequency domain is an error") {
    CHECK_THROWS_WITH_AS(
        build_grid(Window::cube(2, 10.0), DomainSpec(0.01, 0.1), SpacingRule::side()),
        "empty frequency domain", std::invalid_argument);
}

TEST_CASE("spacing rules") {
    const Window cube = Window::cube(2, 40.0);
    CHECK(SpacingRule::parse("A").resolve(cube) == 40.0);
    CHECK(SpacingRule::parse("A/2").resolve(cube) == 20.0);
    CHECK(SpacingRule::parse("12.5").resolve(cube) == 12.5);
    CHECK_THROWS(SpacingRule::parse("banana"));
    const Window rect(2, {10.0, 20.0});
    CHECK_THROWS(SpacingRule::parse("A").resolve(rect));
    CHECK(SpacingRule::parse("8").resolve(rect) == 8.0);
}

TEST_CASE("pattern containment and duplicates") {
    const Window win = Window::cube(2, 10.0);
    CHECK_NOTHROW(PointPattern(win, {0.1, 0.2, -5.0, 5.0}));
    CHECK_THROWS_WITH_AS(PointPattern(win, {6.0, 0.0}), "point outside window (row 0)",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(PointPattern(win, {1.0, 1.0, 1.0, 1.0}), "duplicate point in pattern",
                         std::invalid_argument);

    // random patterns always construct; shifting one point outside fails
    Philox2x64 rng(7, 0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> pts;
        for (int i = 0; i < 50; ++i) {
            pts.push_back(10.0 * (rng.next_double() - 0.5));
            pts.push_back(10.0 * (rng.next_double() - 0.5));
        }
        CHECK_NOTHROW(PointPattern(win, pts));
        pts[0] += 10.0;
        CHECK_THROWS_AS(PointPattern(win, pts), std::invalid_argument);
        pts[0] -= 10.0;
    }
}

TEST_CASE("pattern io round trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ppspec_io_test";
    fs::create_directories(dir);

    SUBCASE("single point file with window header") {
        const fs::path p = dir / "single.csv";
        {
            std::FILE* f = std::fopen(p.c_str(), "w");
            std::fputs("# dim: 2\n# window: -5 5 -5 5\n0.1,0.2\n", f);
            std::fclose(f);
        }
        const PointPattern pattern = read_pattern(p.string());
        CHECK(pattern.size() == 1);
        CHECK(pattern.point(0)[0] == 0.1);
        CHECK(pattern.point(0)[1] == 0.2);
        CHECK(pattern.window().side(0) == 10.0);
    }

    SUBCASE("point outside declared window names the row") {
        const fs::path p = dir / "outside.csv";
        {
            std::FILE* f = std::fopen(p.c_str(), "w");
            std::fputs("# dim: 2\n# window: -5 5 -5 5\n0.0,0.0\n6.0,0.0\n", f);
            std::fclose(f);
        }
        CHECK_THROWS_WITH_AS(read_pattern(p.string()), "point outside window (row 1)",
                             std::invalid_argument);
    }

    SUBCASE("duplicate row rejected") {
        const fs::path p = dir / "dup.csv";
        {
            std::FILE* f = std::fopen(p.c_str(), "w");
            std::fputs("# dim: 2\n# window: -5 5 -5 5\n1.0,1.0\n1.0,1.0\n", f);
            std::fclose(f);
        }
        CHECK_THROWS_AS(read_pattern(p.string()), std::invalid_argument);
    }

    SUBCASE("1000-point bitwise round trip") {
        Philox2x64 rng(42, 1);
        std::vector<double> pts;
        for (int i = 0; i < 1000; ++i) {
            pts.push_back(40.0 * (rng.next_double() - 0.5));
            pts.push_back(40.0 * (rng.next_double() - 0.5));
        }
        const PointPattern original(Window::cube(2, 40.0), pts);
        const fs::path p = dir / "big.csv";
        write_pattern(original, p.string());
        const PointPattern restored = read_pattern(p.string());
        REQUIRE(restored.size() == original.size());
        for (std::size_t i = 0; i < original.size(); ++i) {
            CHECK(restored.point(i)[0] == original.point(i)[0]);
            CHECK(restored.point(i)[1] == original.point(i)[1]);
        }
        CHECK(restored.window().volume() == original.window().volume());
    }
}

TEST_CASE("domain spec validation") {
    CHECK_THROWS(DomainSpec(2.0, 1.0));
    CHECK_THROWS(DomainSpec(-0.5, 1.0));
    CHECK_THROWS(DomainSpec(1.0, 1.0));
    const DomainSpec d(0.0, 2.0);
    CHECK(d.contains_inf_norm(0.0));
    CHECK(d.contains_inf_norm(2.0));
    CHECK_FALSE(d.contains_inf_norm(2.1));
}
