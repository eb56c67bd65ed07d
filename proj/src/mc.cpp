#include "ppspec/mc.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ppspec/dft.hpp"
#include "ppspec/simulate.hpp"
#include "ppspec/taper.hpp"

namespace ppspec {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt17(v[i]);
    }
    return out;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_key_values(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
    ScenarioConfig cfg;
    for (const auto& [key, value] : pairs) {
        if (key == "model") cfg.model_spec = value;
        else if (key == "dim") cfg.dim = std::stoi(value);
        else if (key == "window") cfg.window_sides = parse_csv_doubles(value);
        else if (key == "taper") cfg.taper_spec = value;
        else if (key == "domain") {
            const auto v = parse_csv_doubles(value);
            if (v.size() != 2) throw std::invalid_argument("domain needs d0,d1");
            cfg.d0 = v[0];
            cfg.d1 = v[1];
        } else if (key == "omega") cfg.spacing = value;
        else if (key == "family") cfg.fit_family = value;
        else if (key == "estimators") {
            cfg.estimator_whittle = value.find("whittle") != std::string::npos;
            cfg.estimator_reduced = value.find("reduced") != std::string::npos;
        } else if (key == "replicates") cfg.replicates = std::stoi(value);
        else if (key == "seed") cfg.master_seed = std::stoull(value);
        else if (key == "out") cfg.output_dir = value;
        else if (key == "reference") cfg.reference = parse_csv_doubles(value);
        else if (key == "starts") cfg.optimizer.multistarts = std::stoi(value);
        else if (key == "max_iter") cfg.optimizer.max_iterations = std::stoi(value);
        else throw std::invalid_argument("unknown scenario key: " + key);
    }
    if (cfg.model_spec.empty()) throw std::invalid_argument("scenario needs model=");
    if (cfg.window_sides.empty()) throw std::invalid_argument("scenario needs window=");
    if (cfg.replicates < 1) throw std::invalid_argument("replicate count must be >= 1");
    if (!(cfg.d1 > cfg.d0)) throw std::invalid_argument("scenario needs domain=d0,d1");
    return cfg;
}

std::vector<std::pair<std::string, std::string>> ScenarioConfig::to_key_values() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("model", model_spec);
    kv.emplace_back("dim", std::to_string(dim));
    kv.emplace_back("window", join_doubles(window_sides));
    kv.emplace_back("taper", taper_spec);
    kv.emplace_back("domain", fmt17(d0) + "," + fmt17(d1));
    kv.emplace_back("omega", spacing);
    kv.emplace_back("family", fit_family);
    std::string est;
    if (estimator_whittle) est += "whittle";
    if (estimator_reduced) est += est.empty() ? "whittle_reduced" : ",whittle_reduced";
    kv.emplace_back("estimators", est);
    kv.emplace_back("replicates", std::to_string(replicates));
    kv.emplace_back("seed", std::to_string(master_seed));
    kv.emplace_back("out", output_dir);
    if (reference) kv.emplace_back("reference", join_doubles(*reference));
    kv.emplace_back("starts", std::to_string(optimizer.multistarts));
    kv.emplace_back("max_iter", std::to_string(optimizer.max_iterations));
    return kv;
}

McResult run_mc(const ScenarioConfig& scenario) {
    const int d = scenario.dim;
    std::vector<double> sides = scenario.window_sides;
    if (sides.size() == 1 && d > 1) sides.assign(static_cast<std::size_t>(d), sides[0]);
    const Window window(d, sides);
    const SpectralModel model = SpectralModel::parse(d, scenario.model_spec);
    const Taper taper = Taper::parse(d, scenario.taper_spec);
    const DomainSpec domain(scenario.d0, scenario.d1);
    const SpacingRule spacing = SpacingRule::parse(scenario.spacing);
    SpectralModel::Family fit_family = SpectralModel::Family::Thomas;
    if (scenario.estimator_whittle) {
        if (scenario.fit_family == "poisson") fit_family = SpectralModel::Family::Poisson;
        else if (scenario.fit_family == "thomas") fit_family = SpectralModel::Family::Thomas;
        else if (scenario.fit_family == "matern") fit_family = SpectralModel::Family::Matern;
        else if (scenario.fit_family == "gdpp") fit_family = SpectralModel::Family::Gdpp;
        else if (scenario.fit_family == "hawkes") fit_family = SpectralModel::Family::HawkesExp;
        else throw std::invalid_argument("cannot fit family " + scenario.fit_family);
    }

    const int n_estimators = (scenario.estimator_whittle ? 1 : 0) +
                             (scenario.estimator_reduced ? 1 : 0);
    if (n_estimators == 0) throw std::invalid_argument("scenario selects no estimator");

    const int reps = scenario.replicates;
    std::vector<McReplicateRow> rows(static_cast<std::size_t>(reps * n_estimators));

#pragma omp parallel for schedule(dynamic)
    for (int rep = 0; rep < reps; ++rep) {
        const std::uint64_t seed = derive_seed(scenario.master_seed,
                                               static_cast<std::uint64_t>(rep));
        std::size_t slot = static_cast<std::size_t>(rep * n_estimators);
        try {
            const PointPattern pattern = simulate(model, window, seed);
            const FrequencyGrid grid = build_grid(window, domain, spacing);
            const PeriodogramField field = periodogram_grid(pattern, taper, grid);
            if (scenario.estimator_whittle) {
                McReplicateRow& row = rows[slot++];
                row.replicate = rep;
                row.estimator = "whittle";
                row.n_points = pattern.size();
                const auto t0 = std::chrono::steady_clock::now();
                const FitResult fr = fit_field(field, fit_family, scenario.optimizer);
                row.seconds = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
                row.converged = fr.converged;
                row.theta = fr.theta;
                row.objective = fr.objective;
            }
            if (scenario.estimator_reduced) {
                McReplicateRow& row = rows[slot++];
                row.replicate = rep;
                row.estimator = "whittle_reduced";
                row.n_points = pattern.size();
                const auto t0 = std::chrono::steady_clock::now();
                const FitResult fr = fit_reduced_tcp_field(field, scenario.optimizer);
                row.seconds = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
                row.converged = fr.converged;
                row.theta = fr.theta;
                row.objective = fr.objective;
            }
        } catch (const std::exception& e) {
            for (int j = 0; j < n_estimators; ++j) {
                McReplicateRow& row =
                    rows[static_cast<std::size_t>(rep * n_estimators + j)];
                row.replicate = rep;
                row.estimator = j == 0 && scenario.estimator_whittle ? "whittle"
                                                                     : "whittle_reduced";
                row.failed = true;
                row.failure_reason = e.what();
            }
        }
    }

    McResult result;
    result.replicates = std::move(rows);

    // summaries per estimator/parameter
    std::map<std::string, std::vector<const McReplicateRow*>> by_estimator;
    int failures = 0;
    for (const auto& row : result.replicates) {
        if (row.failed) {
            ++failures;
            continue;
        }
        by_estimator[row.estimator].push_back(&row);
    }
    result.failure_rate =
        static_cast<double>(failures) / static_cast<double>(result.replicates.size());

    for (const auto& [estimator, rws] : by_estimator) {
        if (rws.empty()) continue;
        const std::size_t p = rws.front()->theta.size();
        const std::vector<std::string> names =
            estimator == "whittle_reduced"
                ? SpectralModel::param_names_for(SpectralModel::Family::Thomas)
                : SpectralModel::param_names_for(fit_family);
        double secs = 0.0;
        for (const auto* r : rws) secs += r->seconds;
        secs /= static_cast<double>(rws.size());
        if (estimator == "whittle") result.mean_seconds_whittle = secs;
        else result.mean_seconds_reduced = secs;
        for (std::size_t i = 0; i < p; ++i) {
            McSummaryRow s;
            s.estimator = estimator;
            s.parameter = i < names.size() ? names[i] : "theta" + std::to_string(i);
            double mean = 0.0;
            for (const auto* r : rws) mean += r->theta[i];
            mean /= static_cast<double>(rws.size());
            s.mean = mean;
            double ref = std::numeric_limits<double>::quiet_NaN();
            if (scenario.reference && i < scenario.reference->size())
                ref = (*scenario.reference)[i];
            else if (model.family() == fit_family && estimator == "whittle")
                ref = model.params()[i];
            s.reference = ref;
            s.bias = std::isnan(ref) ? std::numeric_limits<double>::quiet_NaN() : mean - ref;
            if (rws.size() >= 2) {
                double ss = 0.0;
                for (const auto* r : rws) ss += (r->theta[i] - mean) * (r->theta[i] - mean);
                s.se = std::sqrt(ss / static_cast<double>(rws.size() - 1));
            } else {
                s.se = std::numeric_limits<double>::quiet_NaN();
            }
            result.summary.push_back(std::move(s));
        }
    }

    if (!scenario.output_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(scenario.output_dir);
        {
            std::ofstream cfg(scenario.output_dir + "/config.echo");
            for (const auto& [k, v] : scenario.to_key_values()) cfg << k << "=" << v << "\n";
        }
        {
            // deterministic replicate table; wall times live in timing.csv so
            // this file is bit-identical across runs and worker counts
            std::ofstream rep(scenario.output_dir + "/replicates.csv");
            rep << "replicate,estimator,n_points,converged,failed,theta,objective,reason\n";
            for (const auto& row : result.replicates) {
                rep << row.replicate << ',' << row.estimator << ',' << row.n_points << ','
                    << (row.converged ? 1 : 0) << ',' << (row.failed ? 1 : 0) << ','
                    << '"' << join_doubles(row.theta) << '"' << ','
                    << fmt17(row.objective) << ',' << '"' << row.failure_reason << '"' << "\n";
            }
        }
        {
            std::ofstream tim(scenario.output_dir + "/timing.csv");
            tim << "replicate,estimator,seconds\n";
            for (const auto& row : result.replicates) {
                tim << row.replicate << ',' << row.estimator << ',' << row.seconds << "\n";
            }
        }
        {
            std::ofstream sum(scenario.output_dir + "/summary.csv");
            sum << "estimator,parameter,reference,mean,bias,se,mean_time_sec,failure_rate\n";
            for (const auto& s : result.summary) {
                sum << s.estimator << ',' << s.parameter << ',';
                sum << (std::isnan(s.reference) ? "NA" : fmt17(s.reference)) << ',';
                sum << fmt17(s.mean) << ',';
                sum << (std::isnan(s.bias) ? "NA" : fmt17(s.bias)) << ',';
                sum << (std::isnan(s.se) ? "NA" : fmt17(s.se)) << ',';
                sum << (s.estimator == "whittle" ? result.mean_seconds_whittle
                                                 : result.mean_seconds_reduced)
                    << ',' << result.failure_rate << "\n";
            }
        }
    }
    return result;
}

}  // namespace ppspec
