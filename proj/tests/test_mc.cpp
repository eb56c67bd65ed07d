#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ppspec/mc.hpp"
#include "test_helpers.hpp"

using namespace ppspec;

namespace {

ScenarioConfig small_scenario(const std::string& out_dir) {
    return ScenarioConfig::from_key_values({
        {"model", "poisson:lambda=1"},
        {"dim", "2"},
        {"window", "20"},
        {"taper", "smooth:0.025"},
        {"domain", "0.3141592653589793,6.283185307179586"},
        {"omega", "A"},
        {"family", "poisson"},
        {"replicates", "6"},
        {"seed", "77"},
        {"out", out_dir},
    });
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("replicate table is identical across worker counts") {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "ppspec_mc_test";
    fs::remove_all(base);

#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    run_mc(small_scenario((base / "one").string()));
#ifdef _OPENMP
    omp_set_num_threads(2);
#endif
    run_mc(small_scenario((base / "two").string()));
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif

    // wall times live in timing.csv / the summary time column, so the
    // replicate table is the bit-stability contract
    CHECK(slurp(base / "one" / "replicates.csv") == slurp(base / "two" / "replicates.csv"));
    CHECK_FALSE(slurp(base / "one" / "replicates.csv").empty());
    // estimate columns of the summary agree (time column excluded)
    auto strip_time = [](const std::string& text) {
        std::stringstream in(text), out;
        std::string line;
        while (std::getline(in, line)) {
            const auto last = line.rfind(',');
            const auto second_last = line.rfind(',', last - 1);
            out << line.substr(0, second_last) << "\n";
        }
        return out.str();
    };
    CHECK(strip_time(slurp(base / "one" / "summary.csv")) ==
          strip_time(slurp(base / "two" / "summary.csv")));
    CHECK_FALSE(slurp(base / "one" / "config.echo").empty());
}

TEST_CASE("summary aggregates replicate estimates") {
    ScenarioConfig scenario = small_scenario("");
    const McResult result = run_mc(scenario);
    REQUIRE(result.replicates.size() == 6);
    REQUIRE(result.summary.size() == 1);
    std::vector<double> lams;
    for (const auto& row : result.replicates) {
        REQUIRE_FALSE(row.failed);
        CHECK(row.estimator == "whittle");
        CHECK(row.n_points > 0);
        lams.push_back(row.theta[0]);
    }
    const auto& s = result.summary[0];
    CHECK(s.parameter == "lambda");
    CHECK(s.reference == 1.0);  // truth inferred from the matching family
    CHECK(s.mean == doctest::Approx(testutil::mean(lams)));
    CHECK(s.bias == doctest::Approx(testutil::mean(lams) - 1.0));
    CHECK(s.se == doctest::Approx(std::sqrt(testutil::sample_var(lams))));
    CHECK(result.failure_rate == 0.0);
}

TEST_CASE("single replicate reports no standard error") {
    ScenarioConfig scenario = small_scenario("");
    scenario.replicates = 1;
    const McResult result = run_mc(scenario);
    REQUIRE(result.summary.size() == 1);
    CHECK(std::isnan(result.summary[0].se));
}

TEST_CASE("failures are recorded with reasons") {
    // lgcp simulation is unsupported in d = 3, so every replicate fails
    ScenarioConfig scenario = ScenarioConfig::from_key_values({
        {"model", "lgcp:mu=0,s2=1,phi=1"},
        {"dim", "3"},
        {"window", "6"},
        {"domain", "0.5,2.0"},
        {"family", "poisson"},
        {"replicates", "3"},
        {"seed", "1"},
    });
    const McResult result = run_mc(scenario);
    CHECK(result.failure_rate == 1.0);
    for (const auto& row : result.replicates) {
        CHECK(row.failed);
        CHECK_FALSE(row.failure_reason.empty());
    }
}

TEST_CASE("scenario parsing validation") {
    CHECK_THROWS(ScenarioConfig::from_key_values({{"model", "poisson:lambda=1"}}));
    CHECK_THROWS(ScenarioConfig::from_key_values({{"bogus", "1"}}));
    CHECK_THROWS(ScenarioConfig::from_key_values({
        {"model", "poisson:lambda=1"},
        {"window", "20"},
        {"domain", "0.3"},
    }));
}

TEST_CASE("reduced estimator summary on misspecified data"
          * doctest::test_suite("montecarlo")) {
    ScenarioConfig scenario = ScenarioConfig::from_key_values({
        {"model", "lgcp:mu=-0.5,s2=2,phi=1"},
        {"dim", "2"},
        {"window", "20"},
        {"domain", "0.3141592653589793,6.283185307179586"},
        {"family", "thomas"},
        {"estimators", "whittle,whittle_reduced"},
        {"replicates", "20"},
        {"seed", "3400"},
    });
    const McResult result = run_mc(scenario);
    CHECK(result.failure_rate == 0.0);
    REQUIRE(result.replicates.size() == 40);
    int reduced_rows = 0;
    for (const auto& row : result.replicates) {
        if (row.estimator == "whittle_reduced") {
            ++reduced_rows;
            REQUIRE(row.theta.size() == 3);
            CHECK(row.theta[0] * row.theta[1] > 0.0);
        }
    }
    CHECK(reduced_rows == 20);
    CHECK(result.summary.size() == 6);  // two estimators, three parameters each
}
