#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ppspec/dft.hpp"
#include "ppspec/mc.hpp"
#include "ppspec/pattern_io.hpp"
#include "ppspec/simulate.hpp"
#include "ppspec/smoothing.hpp"
#include "ppspec/specmean.hpp"
#include "ppspec/variance.hpp"
#include "ppspec/whittle.hpp"

namespace {

using nlohmann::json;
using namespace ppspec;

struct GridArgs {
    std::string domain;
    std::string omega = "A";

    DomainSpec parse_domain() const {
        const auto comma = domain.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("--domain needs d0,d1");
        return DomainSpec(std::stod(domain.substr(0, comma)),
                          std::stod(domain.substr(comma + 1)));
    }
};

SpectralModel::Family family_from_name(const std::string& name) {
    if (name == "poisson") return SpectralModel::Family::Poisson;
    if (name == "thomas") return SpectralModel::Family::Thomas;
    if (name == "matern") return SpectralModel::Family::Matern;
    if (name == "gdpp") return SpectralModel::Family::Gdpp;
    if (name == "hawkes") return SpectralModel::Family::HawkesExp;
    throw std::invalid_argument("unknown fit family: " + name);
}

json fit_to_json(const FitResult& fr) {
    json j;
    j["family"] = fr.family;
    j["reduced"] = fr.reduced;
    j["theta"] = fr.theta;
    j["objective"] = fr.objective;
    j["iterations"] = fr.iterations;
    j["converged"] = fr.converged;
    j["lambda_hat"] = fr.lambda_hat;
    j["implied_intensity"] = fr.implied_intensity;
    j["grid"] = {{"omega", fr.grid_spacing},
                 {"d0", fr.domain_d0},
                 {"d1", fr.domain_d1},
                 {"size", fr.grid_size}};
    return j;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << j.dump(2) << "\n";
    }
}

std::vector<double> comma_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-domain estimation for spatial point processes"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP worker count (0 = library default)");

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "draw a pattern from a model");
    std::string sim_model, sim_window, sim_out;
    int sim_dim = 2;
    std::uint64_t sim_seed = 1;
    sim->add_option("--model", sim_model, "family:key=value,...")->required();
    sim->add_option("--window", sim_window, "side length(s), comma separated")->required();
    sim->add_option("--dim", sim_dim, "dimension (default 2)");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("-o,--out", sim_out, "output pattern CSV")->required();

    // ---- periodogram ----
    auto* per = app.add_subcommand("periodogram", "tapered periodogram on the domain grid");
    std::string per_pattern, per_taper = "smooth:0.025", per_out;
    GridArgs per_grid;
    per->add_option("--pattern", per_pattern)->required();
    per->add_option("--taper", per_taper, "uniform|smooth:<a>");
    per->add_option("--domain", per_grid.domain, "d0,d1 (sup-norm annulus)")->required();
    per->add_option("--omega", per_grid.omega, "A|A/2|<value>");
    per->add_option("-o,--out", per_out, "output field CSV")->required();

    // ---- smooth ----
    auto* smo = app.add_subcommand("smooth", "kernel-smoothed spectral density estimate");
    std::string smo_field, smo_bandwidth = "auto", smo_out;
    smo->add_option("--field", smo_field)->required();
    smo->add_option("--bandwidth", smo_bandwidth, "auto|<b>");
    smo->add_option("-o,--out", smo_out, "output field CSV")->required();

    // ---- fit ----
    auto* fitc = app.add_subcommand("fit", "Whittle fit of a parametric family");
    std::string fit_pattern, fit_family, fit_taper = "smooth:0.025", fit_out;
    GridArgs fit_grid;
    bool fit_reduced = false;
    int fit_starts = 4, fit_max_iter = 4000;
    double fit_ci = 0.0, fit_block = 0.0;
    fitc->add_option("--pattern", fit_pattern)->required();
    fitc->add_option("--family", fit_family, "poisson|thomas|matern|gdpp|hawkes");
    fitc->add_option("--taper", fit_taper);
    fitc->add_option("--domain", fit_grid.domain)->required();
    fitc->add_option("--omega", fit_grid.omega);
    fitc->add_flag("--reduced", fit_reduced, "Thomas fit with alpha = lambda_hat/kappa");
    fitc->add_option("--starts", fit_starts);
    fitc->add_option("--max-iter", fit_max_iter);
    fitc->add_option("--ci", fit_ci, "alpha for sandwich confidence intervals");
    fitc->add_option("--block", fit_block, "subsampling block side for --ci");
    fitc->add_option("-o,--out", fit_out, "output JSON (stdout when omitted)");

    // ---- subsample ----
    auto* sub = app.add_subcommand("subsample", "subsampling variance of a spectral mean");
    std::string sub_pattern, sub_phi = "const", sub_model, sub_taper = "smooth:0.025", sub_out;
    GridArgs sub_grid;
    double sub_block = 0.0, sub_stride = 1.0;
    int sub_min_blocks = 20;
    sub->add_option("--pattern", sub_pattern)->required();
    sub->add_option("--phi", sub_phi, "const | grad (needs --model at theta)");
    sub->add_option("--model", sub_model, "model for phi=grad");
    sub->add_option("--taper", sub_taper);
    sub->add_option("--domain", sub_grid.domain)->required();
    sub->add_option("--omega", sub_grid.omega);
    sub->add_option("--block", sub_block, "block side a_n");
    sub->add_option("--stride", sub_stride);
    sub->add_option("--min-blocks", sub_min_blocks);
    sub->add_option("-o,--out", sub_out);

    // ---- oracle ----
    auto* ora = app.add_subcommand("oracle", "true-spectrum oracles for test pipelines");
    auto* bestfit = ora->add_subcommand("best-fit", "spectral-divergence minimizer");
    std::string bf_true, bf_family, bf_out;
    std::string bf_window;
    int bf_dim = 2;
    GridArgs bf_grid;
    int bf_starts = 4;
    bestfit->add_option("--true", bf_true, "true model spec")->required();
    bestfit->add_option("--family", bf_family)->required();
    bestfit->add_option("--domain", bf_grid.domain)->required();
    bestfit->add_option("--omega", bf_grid.omega);
    bestfit->add_option("--window", bf_window, "side length(s)")->required();
    bestfit->add_option("--dim", bf_dim);
    bestfit->add_option("--starts", bf_starts);
    bestfit->add_option("-o,--out", bf_out);
    auto* smean = ora->add_subcommand("spectral-mean", "Riemann A(phi) with phi = 1");
    std::string sm_model, sm_window, sm_out;
    int sm_dim = 2;
    GridArgs sm_grid;
    smean->add_option("--model", sm_model)->required();
    smean->add_option("--domain", sm_grid.domain)->required();
    smean->add_option("--omega", sm_grid.omega);
    smean->add_option("--window", sm_window)->required();
    smean->add_option("--dim", sm_dim);
    smean->add_option("-o,--out", sm_out);

    // ---- mc ----
    auto* mc = app.add_subcommand("mc", "Monte Carlo replication harness");
    std::string mc_config;
    std::vector<std::string> mc_sets;
    mc->add_option("--config", mc_config, "flat key=value scenario file");
    mc->add_option("--set", mc_sets, "key=value override (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (*sim) {
            const auto sides = comma_doubles(sim_window);
            const Window window(sim_dim, sides.size() == 1
                                             ? std::vector<double>(sim_dim, sides[0])
                                             : sides);
            const SpectralModel model = SpectralModel::parse(sim_dim, sim_model);
            const PointPattern pattern = simulate(model, window, sim_seed);
            write_pattern(pattern, sim_out);
        } else if (*per) {
            const PointPattern pattern = read_pattern(per_pattern);
            const Taper taper = Taper::parse(pattern.dim(), per_taper);
            const FrequencyGrid grid = build_grid(pattern.window(), per_grid.parse_domain(),
                                                  SpacingRule::parse(per_grid.omega));
            write_field(periodogram_grid(pattern, taper, grid), per_out);
        } else if (*smo) {
            PeriodogramField field = read_field(smo_field);
            const double b = smo_bandwidth == "auto" ? default_bandwidth(field.window)
                                                     : std::stod(smo_bandwidth);
            const SmoothingKernel kernel(b);
            field.values = ksde_on_grid(field, kernel);
            write_field(field, smo_out);
        } else if (*fitc) {
            const PointPattern pattern = read_pattern(fit_pattern);
            const Taper taper = Taper::parse(pattern.dim(), fit_taper);
            const DomainSpec domain = fit_grid.parse_domain();
            const SpacingRule spacing = SpacingRule::parse(fit_grid.omega);
            OptimizerConfig cfg;
            cfg.multistarts = fit_starts;
            cfg.max_iterations = fit_max_iter;
            FitResult fr;
            if (fit_reduced) {
                fr = fit_reduced_tcp(pattern, domain, taper, spacing, cfg);
            } else {
                if (fit_family.empty())
                    throw std::invalid_argument("--family is required without --reduced");
                fr = fit(pattern, family_from_name(fit_family), domain, taper, spacing, cfg);
            }
            json j = fit_to_json(fr);
            if (fit_ci > 0.0) {
                SubsampleConfig sscfg;
                sscfg.block_side = fit_block;
                const auto cis =
                    whittle_ci(fr, pattern, taper, domain, spacing, sscfg, fit_ci);
                json jci = json::array();
                for (const auto& ci : cis)
                    jci.push_back({{"lower", ci.lower},
                                   {"upper", ci.upper},
                                   {"variance", ci.variance}});
                j["confidence_intervals"] = jci;
                j["ci_alpha"] = fit_ci;
            }
            emit(j, fit_out);
        } else if (*sub) {
            const PointPattern pattern = read_pattern(sub_pattern);
            const Taper taper = Taper::parse(pattern.dim(), sub_taper);
            const DomainSpec domain = sub_grid.parse_domain();
            const SpacingRule spacing = SpacingRule::parse(sub_grid.omega);
            SubsampleConfig cfg;
            cfg.block_side = sub_block;
            cfg.stride = sub_stride;
            cfg.min_blocks = sub_min_blocks;
            SpectralFunctional phi;
            if (sub_phi == "const") {
                phi = SpectralFunctional::constant(1.0);
            } else if (sub_phi == "grad") {
                if (sub_model.empty())
                    throw std::invalid_argument("--phi grad needs --model");
                const SpectralModel m = SpectralModel::parse(pattern.dim(), sub_model);
                phi.n_out = m.n_params();
                phi.eval = [m](std::span<const double> w, std::span<double> out) {
                    double w2 = 0.0;
                    for (double wi : w) w2 += wi * wi;
                    const double radial = std::sqrt(w2);
                    const double f = m.spectral_density_radial(radial);
                    m.spectral_gradient_radial(radial, out);
                    for (auto& o : out) o = -o / (f * f);
                };
            } else {
                throw std::invalid_argument("--phi must be const or grad");
            }
            const auto zeta =
                subsample_variance(pattern, phi, domain, taper, spacing, cfg);
            const double a = cfg.resolved_block(pattern.window());
            json j;
            j["a_n"] = a;
            int blocks = 1;
            for (int i = 0; i < pattern.dim(); ++i) {
                const int per_axis =
                    2 * static_cast<int>(std::floor(0.5 * (pattern.window().side(i) - a) /
                                                        cfg.stride +
                                                    1e-9)) +
                    1;
                blocks *= per_axis;
            }
            j["blocks"] = blocks;
            if (phi.n_out == 1) j["zeta"] = zeta[0];
            else j["zeta"] = zeta;
            emit(j, sub_out);
        } else if (*ora) {
            if (*bestfit) {
                const auto sides = comma_doubles(bf_window);
                const Window window(bf_dim, sides.size() == 1
                                                ? std::vector<double>(bf_dim, sides[0])
                                                : sides);
                const SpectralModel true_model = SpectralModel::parse(bf_dim, bf_true);
                OptimizerConfig cfg;
                cfg.multistarts = bf_starts;
                const FitResult fr = best_fit_oracle(true_model, family_from_name(bf_family),
                                                     bf_grid.parse_domain(), window,
                                                     SpacingRule::parse(bf_grid.omega), cfg);
                emit(fit_to_json(fr), bf_out);
            } else if (*smean) {
                const auto sides = comma_doubles(sm_window);
                const Window window(sm_dim, sides.size() == 1
                                                ? std::vector<double>(sm_dim, sides[0])
                                                : sides);
                const SpectralModel model = SpectralModel::parse(sm_dim, sm_model);
                const FrequencyGrid grid = build_grid(window, sm_grid.parse_domain(),
                                                      SpacingRule::parse(sm_grid.omega));
                const auto value =
                    spectral_mean_true(model, SpectralFunctional::constant(1.0), grid);
                json j;
                j["spectral_mean"] = value[0];
                j["grid_size"] = grid.size();
                emit(j, sm_out);
            } else {
                throw std::invalid_argument("oracle needs a subcommand: best-fit|spectral-mean");
            }
        } else if (*mc) {
            std::vector<std::pair<std::string, std::string>> pairs;
            if (!mc_config.empty()) {
                std::ifstream in(mc_config);
                if (!in) throw std::runtime_error("cannot open config: " + mc_config);
                std::string line;
                while (std::getline(in, line)) {
                    if (line.empty() || line[0] == '#') continue;
                    const auto eq = line.find('=');
                    if (eq == std::string::npos)
                        throw std::invalid_argument("config line needs key=value: " + line);
                    pairs.emplace_back(line.substr(0, eq), line.substr(eq + 1));
                }
            }
            for (const auto& s : mc_sets) {
                const auto eq = s.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("--set needs key=value");
                pairs.emplace_back(s.substr(0, eq), s.substr(eq + 1));
            }
            const ScenarioConfig scenario = ScenarioConfig::from_key_values(pairs);
            const McResult result = run_mc(scenario);
            std::printf("estimator,parameter,reference,mean,bias,se\n");
            for (const auto& s : result.summary) {
                std::printf("%s,%s,%g,%.6g,%.6g,%.6g\n", s.estimator.c_str(),
                            s.parameter.c_str(), s.reference, s.mean, s.bias, s.se);
            }
            if (result.failure_rate > 0.10) {
                std::fprintf(stderr, "error: replicate failure rate %.1f%% exceeds 10%%\n",
                             100.0 * result.failure_rate);
                return 1;
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
