#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppspec/geometry.hpp"
#include "ppspec/models.hpp"
#include "ppspec/whittle.hpp"

namespace ppspec {

// One simulation scenario: simulate `model` on `window`, fit `fit_family`
// (and/or the reduced Thomas model) on the prespecified domain, replicate_count
// times with per-replicate streams (master_seed, replicate).
struct ScenarioConfig {
    std::string model_spec;
    int dim = 2;
    std::vector<double> window_sides;
    std::string taper_spec = "smooth:0.025";
    double d0 = 0.0, d1 = 0.0;
    std::string spacing = "A";
    std::string fit_family = "thomas";
    bool estimator_whittle = true;
    bool estimator_reduced = false;
    int replicates = 100;
    std::uint64_t master_seed = 1;
    std::string output_dir;
    std::optional<std::vector<double>> reference;  // truth or oracle best-fit
    OptimizerConfig optimizer;

    static ScenarioConfig from_key_values(
        const std::vector<std::pair<std::string, std::string>>& pairs);
    std::vector<std::pair<std::string, std::string>> to_key_values() const;
};

struct McReplicateRow {
    int replicate = 0;
    std::string estimator;
    std::size_t n_points = 0;
    bool converged = false;
    bool failed = false;
    std::string failure_reason;
    std::vector<double> theta;
    double objective = 0.0;
    double seconds = 0.0;
};

struct McSummaryRow {
    std::string estimator;
    std::string parameter;
    double reference = 0.0;
    double mean = 0.0;
    double bias = 0.0;
    double se = 0.0;  // empirical sd across replicates; NaN when replicates < 2
};

struct McResult {
    std::vector<McReplicateRow> replicates;
    std::vector<McSummaryRow> summary;
    double failure_rate = 0.0;
    double mean_seconds_whittle = 0.0;
    double mean_seconds_reduced = 0.0;
};

// Runs the scenario (OpenMP over replicates, deterministic output independent
// of the worker count) and, when output_dir is set, writes config.echo,
// replicates.csv, timing.csv, and summary.csv.
McResult run_mc(const ScenarioConfig& scenario);

}  // namespace ppspec
